#include "spectral_rl/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace spectral {

TdErrorTracker::TdErrorTracker(int num_buckets, double decay)
    : decay_(decay), abs_error_(static_cast<size_t>(num_buckets), 0.0),
      abs_target_(static_cast<size_t>(num_buckets), 0.0),
      counts_(static_cast<size_t>(num_buckets), 0) {
    if (num_buckets < 1) throw std::invalid_argument("TdErrorTracker: need >= 1 bucket");
}

void TdErrorTracker::add(const ProbeSample& sample) {
    if (sample.bucket < 0 || sample.bucket >= num_buckets()) return;
    const size_t b = static_cast<size_t>(sample.bucket);
    const double err = std::abs(sample.q_pred - sample.q_target);
    const double mag = std::abs(sample.q_target);
    if (counts_[b] == 0) {
        abs_error_[b] = err;
        abs_target_[b] = mag;
    } else {
        abs_error_[b] = (1.0 - decay_) * abs_error_[b] + decay_ * err;
        abs_target_[b] = (1.0 - decay_) * abs_target_[b] + decay_ * mag;
    }
    ++counts_[b];
}

std::optional<double> TdErrorTracker::percent_error(int bucket) const {
    const size_t b = static_cast<size_t>(bucket);
    if (counts_[b] == 0 || abs_target_[b] < 1e-12) return std::nullopt;
    return abs_error_[b] / abs_target_[b];
}

int scripted_catch_action(const Observation& obs) {
    if (obs[0] > obs[2]) return 2;
    if (obs[0] < obs[2]) return 0;
    return 1;
}

RunRecord run_training(Agent& agent, Env& env, long frames, std::uint64_t seed,
                       const TelemetryConfig& telemetry) {
    const auto t0 = std::chrono::steady_clock::now();
    RunRecord record;
    record.agent = to_string(agent.kind());
    record.seed = seed;

    Observation obs = env.reset(seed);
    // Probes draw from their own stream so telemetry stays read-only.
    std::mt19937_64 probe_rng(telemetry.probe_seed ^ (seed * 0x2545f4914f6cdd1dULL));
    // The probe EMA window reuses the agent's stats decay, but with a step
    // large enough that a handful of probes dominates history.
    TdErrorTracker tracker(env.score_cap(), 0.05);

    double episode_return = 0.0;
    double episode_unexp = 0.0;
    int max_phase = 0;

    for (long frame = 1; frame <= frames; ++frame) {
        int prev_score = 0;
        if (auto* catch_env = dynamic_cast<CatchEnv*>(&env)) prev_score = catch_env->player_score();

        const double eps = agent.epsilon_at(frame - 1);
        const int action = agent.select_action(obs, eps);
        const StepResult sr = env.step(action);

        Transition t;
        t.obs = obs;
        t.next_obs = sr.observation;
        t.action = action;
        t.reward = sr.reward;
        t.terminal = sr.terminal;
        t.score_bucket = prev_score;
        agent.observe(t);

        episode_return += sr.reward;
        episode_unexp += sr.info.unexponentiated_delta;
        if (sr.info.phase == Phase::B) max_phase = 1;

        if (sr.terminal) {
            record.episodes.push_back({frame, episode_return, episode_unexp, max_phase});
            episode_return = 0.0;
            episode_unexp = 0.0;
            max_phase = 0;
            obs = env.reset();
        } else {
            obs = sr.observation;
        }

        if (agent.ready() && frame % agent.config().train_period == 0) agent.train_step();

        if (telemetry.enable_td_probes && frame % telemetry.probe_period == 0 &&
            agent.replay().can_sample(agent.config().n_step)) {
            for (int k = 0; k < telemetry.probe_samples; ++k) {
                const NStepSegment segment =
                    agent.replay().sample_segment(agent.config().n_step, probe_rng);
                tracker.add(agent.probe_segment(segment));
            }
            for (int bucket = 0; bucket < tracker.num_buckets(); ++bucket) {
                const auto pct = tracker.percent_error(bucket);
                record.td_errors.push_back({frame, bucket, pct.value_or(0.0), pct.has_value()});
            }
        }
    }

    record.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return record;
}

namespace {

std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void write_run_csv(const RunRecord& record, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "frame,event_type,value,bucket,seed,agent,env\n";
    const std::string tail = "," + std::to_string(record.seed) + "," + record.agent + "," +
                             record.env + "\n";
    for (const EpisodeRow& e : record.episodes) {
        out << e.frame << ",episode_return," << format_value(e.raw_return) << ",0" << tail;
        out << e.frame << ",unexp_return," << format_value(e.unexp_return) << ",0" << tail;
        out << e.frame << ",max_phase," << e.max_phase << ",0" << tail;
    }
    for (const TdErrorRow& row : record.td_errors) {
        out << row.frame << "," << (row.valid ? "td_pct_error" : "td_pct_missing") << ","
            << format_value(row.value) << "," << row.bucket << tail;
    }
    out << "0,wall_seconds," << format_value(record.wall_seconds) << ",0" << tail;
}

RunRecord read_run_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open run CSV: " + path);
    RunRecord record;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string frame_s, type, value_s, bucket_s, seed_s;
        std::getline(ss, frame_s, ',');
        std::getline(ss, type, ',');
        std::getline(ss, value_s, ',');
        std::getline(ss, bucket_s, ',');
        std::getline(ss, seed_s, ',');
        std::getline(ss, record.agent, ',');
        std::getline(ss, record.env, ',');
        const long frame = std::stol(frame_s);
        const double value = std::stod(value_s);
        record.seed = std::stoull(seed_s);
        if (type == "episode_return") {
            record.episodes.push_back({frame, value, 0.0, 0});
        } else if (type == "unexp_return") {
            record.episodes.back().unexp_return = value;
        } else if (type == "max_phase") {
            record.episodes.back().max_phase = static_cast<int>(value);
        } else if (type == "td_pct_error") {
            record.td_errors.push_back({frame, std::stoi(bucket_s), value, true});
        } else if (type == "td_pct_missing") {
            record.td_errors.push_back({frame, std::stoi(bucket_s), 0.0, false});
        } else if (type == "wall_seconds") {
            record.wall_seconds = value;
        }
    }
    return record;
}

double final_window_score(const std::vector<RunRecord>& records, double fraction,
                          bool unexponentiated) {
    double total = 0.0;
    int used = 0;
    for (const RunRecord& record : records) {
        if (record.episodes.empty()) continue;
        const size_t n = record.episodes.size();
        const size_t count = std::max<size_t>(1, static_cast<size_t>(std::ceil(fraction * n)));
        double sum = 0.0;
        for (size_t k = n - count; k < n; ++k)
            sum += unexponentiated ? record.episodes[k].unexp_return
                                   : record.episodes[k].raw_return;
        total += sum / static_cast<double>(count);
        ++used;
    }
    return used > 0 ? total / used : 0.0;
}

SummaryCurve aggregate_runs(const std::vector<RunRecord>& records, int window, int resamples,
                            std::uint64_t seed, bool unexponentiated) {
    if (records.empty()) throw std::invalid_argument("aggregate_runs: need >= 1 record");
    long max_frame = 0;
    for (const RunRecord& record : records)
        if (!record.episodes.empty())
            max_frame = std::max(max_frame, record.episodes.back().frame);
    if (max_frame == 0) max_frame = 1;

    constexpr int kGridPoints = 100;
    SummaryCurve curve;
    std::mt19937_64 rng(seed);

    for (int g = 1; g <= kGridPoints; ++g) {
        const double frame = static_cast<double>(max_frame) * g / kGridPoints;
        std::vector<double> per_seed;
        for (const RunRecord& record : records) {
            // Trailing window of episodes completed by this frame.
            std::vector<double> returns;
            for (const EpisodeRow& e : record.episodes) {
                if (e.frame > frame) break;
                returns.push_back(unexponentiated ? e.unexp_return : e.raw_return);
            }
            if (returns.empty()) continue;
            const size_t count = std::min<size_t>(returns.size(), static_cast<size_t>(window));
            double sum = 0.0;
            for (size_t k = returns.size() - count; k < returns.size(); ++k) sum += returns[k];
            per_seed.push_back(sum / static_cast<double>(count));
        }
        if (per_seed.empty()) continue;

        double mean = 0.0;
        for (double v : per_seed) mean += v;
        mean /= static_cast<double>(per_seed.size());

        double band = 0.0;
        if (per_seed.size() > 1) {
            std::uniform_int_distribution<size_t> pick(0, per_seed.size() - 1);
            double sum = 0.0, sum_sq = 0.0;
            for (int r = 0; r < resamples; ++r) {
                double resampled = 0.0;
                for (size_t k = 0; k < per_seed.size(); ++k)
                    resampled += per_seed[pick(rng)];
                resampled /= static_cast<double>(per_seed.size());
                sum += resampled;
                sum_sq += resampled * resampled;
            }
            const double n = static_cast<double>(resamples);
            band = std::sqrt(std::max(0.0, sum_sq / n - (sum / n) * (sum / n)));
        }
        curve.frames.push_back(frame);
        curve.mean.push_back(mean);
        curve.lower.push_back(mean - band);
        curve.upper.push_back(mean + band);
    }
    return curve;
}

}  // namespace spectral
