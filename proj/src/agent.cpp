#include "spectral_rl/agent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spectral_rl/tabular.hpp"

namespace spectral {

namespace {

MlpConfig make_net_config(AgentKind kind, const AgentConfig& cfg, int obs_dim,
                          int num_actions) {
    MlpConfig net;
    net.input_dim = obs_dim;
    net.hidden = cfg.hidden;
    net.heads = is_spectral(kind) ? cfg.codec.num_components() : 1;
    net.actions = num_actions;
    net.zero_init_final = is_spectral(kind);
    net.seed = cfg.seed;
    return net;
}

}  // namespace

AgentKind agent_kind_from_name(const std::string& name) {
    if (name == "dqn_clip") return AgentKind::DqnClip;
    if (name == "dqn_unclipped") return AgentKind::DqnUnclipped;
    if (name == "dqn_tc") return AgentKind::DqnTc;
    if (name == "popart") return AgentKind::PopArt;
    if (name == "spectral") return AgentKind::Spectral;
    if (name == "spectral_exp_weights") return AgentKind::SpectralExpWeights;
    if (name == "spectral_flat_weights") return AgentKind::SpectralFlatWeights;
    throw std::invalid_argument("unknown agent kind: " + name);
}

std::string to_string(AgentKind kind) {
    switch (kind) {
        case AgentKind::DqnClip: return "dqn_clip";
        case AgentKind::DqnUnclipped: return "dqn_unclipped";
        case AgentKind::DqnTc: return "dqn_tc";
        case AgentKind::PopArt: return "popart";
        case AgentKind::Spectral: return "spectral";
        case AgentKind::SpectralExpWeights: return "spectral_exp_weights";
        case AgentKind::SpectralFlatWeights: return "spectral_flat_weights";
    }
    return "?";
}

bool is_spectral(AgentKind kind) {
    return kind == AgentKind::Spectral || kind == AgentKind::SpectralExpWeights ||
           kind == AgentKind::SpectralFlatWeights;
}

void AgentConfig::validate() const {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("AgentConfig: gamma must be in (0, 1)");
    if (n_step < 1) throw std::invalid_argument("AgentConfig: n_step must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("AgentConfig: batch_size must be >= 1");
    if (train_period < 1) throw std::invalid_argument("AgentConfig: train_period must be >= 1");
    if (target_refresh < 1)
        throw std::invalid_argument("AgentConfig: target_refresh must be >= 1");
    codec.validate();
}

Agent::Agent(AgentKind kind, AgentConfig cfg, int obs_dim, int num_actions)
    : kind_(kind), cfg_(std::move(cfg)), num_actions_(num_actions),
      online_(make_net_config(kind, cfg_, obs_dim, num_actions)),
      target_(make_net_config(kind, cfg_, obs_dim, num_actions)),
      adam_(online_.num_params(), cfg_.adam),
      replay_(cfg_.replay_capacity),
      rng_(cfg_.seed ^ 0x9e3779b97f4a7c15ULL) {
    cfg_.validate();
    std::copy(online_.params().begin(), online_.params().end(), target_.params().begin());

    switch (kind_) {
        case AgentKind::Spectral: weight_mode_ = LossWeightMode::InverseVariance; break;
        case AgentKind::SpectralExpWeights: weight_mode_ = LossWeightMode::Exponential; break;
        default: weight_mode_ = LossWeightMode::Flat; break;
    }
    if (is_spectral(kind_)) {
        sigma_.resize(static_cast<size_t>(cfg_.codec.num_components()));
        for (RunningStats& s : sigma_) {
            s.decay = cfg_.stats_decay;
            s.sigma_min = cfg_.sigma_min;
        }
    }
    popart_stats_.decay = cfg_.stats_decay;
    popart_stats_.sigma_min = cfg_.sigma_min;

    grads_.assign(online_.num_params(), 0.0);
}

double Agent::epsilon_at(long frame) const {
    if (frame >= cfg_.eps_decay_frames) return cfg_.eps_final;
    const double frac = static_cast<double>(frame) / cfg_.eps_decay_frames;
    return cfg_.eps_start + frac * (cfg_.eps_final - cfg_.eps_start);
}

double Agent::loss_weight(int frequency) const {
    switch (weight_mode_) {
        case LossWeightMode::InverseVariance: {
            const double s = sigma_[static_cast<size_t>(frequency)].sigma();
            return 1.0 / (s * s);
        }
        case LossWeightMode::Exponential:
            return std::pow(cfg_.codec.base, frequency);
        case LossWeightMode::Flat:
            return 1.0;
    }
    return 1.0;
}

std::vector<double> Agent::head_values(const Observation& obs) const {
    std::vector<double> out(static_cast<size_t>(online_.output_dim()));
    online_.forward(obs, out);
    return out;
}

double Agent::true_value(const Mlp& net, const Observation& obs, int action) const {
    std::vector<double> out(static_cast<size_t>(net.output_dim()));
    net.forward(obs, out);
    switch (kind_) {
        case AgentKind::DqnClip:
        case AgentKind::DqnUnclipped:
            return out[static_cast<size_t>(action)];
        case AgentKind::DqnTc:
            return unsquash(out[static_cast<size_t>(action)], cfg_.squash);
        case AgentKind::PopArt:
            return popart_stats_.denormalize(out[static_cast<size_t>(action)]);
        default: {
            double sum = 0.0;
            double weight = 1.0;
            for (int i = 0; i < net.heads(); ++i) {
                sum += weight * out[static_cast<size_t>(i * num_actions_ + action)];
                weight *= cfg_.codec.base;
            }
            return sum;
        }
    }
}

int Agent::true_space_greedy(const Observation& obs) const {
    std::vector<double> values(static_cast<size_t>(num_actions_));
    for (int a = 0; a < num_actions_; ++a) values[static_cast<size_t>(a)] = true_value(online_, obs, a);
    int best = 0;
    for (int a = 1; a < num_actions_; ++a)
        if (values[static_cast<size_t>(a)] > values[static_cast<size_t>(best)]) best = a;
    return best;
}

double Agent::greedy_value(const Observation& obs) const {
    return true_value(online_, obs, true_space_greedy(obs));
}

int Agent::select_action(const Observation& obs, double epsilon) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (unit(rng_) < epsilon)
        return std::uniform_int_distribution<int>(0, num_actions_ - 1)(rng_);
    return true_space_greedy(obs);
}

void Agent::observe(const Transition& transition) { replay_.push(transition); }

void Agent::set_network_params(std::span<const double> params) {
    if (params.size() != online_.num_params())
        throw std::invalid_argument("Agent::set_network_params: size mismatch");
    std::copy(params.begin(), params.end(), online_.params().begin());
    std::copy(params.begin(), params.end(), target_.params().begin());
}

bool Agent::ready() const {
    return replay_.size() >= static_cast<size_t>(std::max(cfg_.warmup, cfg_.batch_size)) &&
           replay_.can_sample(cfg_.n_step);
}

Agent::SegmentTargets Agent::compute_targets(const NStepSegment& segment) const {
    SegmentTargets targets;
    const int comps = is_spectral(kind_) ? cfg_.codec.num_components() : 0;
    std::vector<double> spectral_sums(static_cast<size_t>(comps), 0.0);
    std::vector<double> components(static_cast<size_t>(comps));

    double scalar_sum = 0.0;
    double gamma_pow = 1.0;
    for (int k = 0; k < segment.length; ++k) {
        const Transition& t = replay_.at(segment.start_index + k);
        double r = t.reward;
        if (kind_ == AgentKind::DqnClip) r = std::clamp(r, -1.0, 1.0);
        if (comps > 0) {
            decompose_into(t.reward, cfg_.codec, components);
            for (int i = 0; i < comps; ++i)
                spectral_sums[static_cast<size_t>(i)] += gamma_pow * components[static_cast<size_t>(i)];
        } else {
            scalar_sum += gamma_pow * r;
        }
        gamma_pow *= cfg_.gamma;
    }

    const Transition& last = replay_.at(segment.start_index + segment.length - 1);
    const Observation& bootstrap_obs = last.next_obs;
    const bool terminal = segment.terminal;

    std::vector<double> target_out;
    if (!terminal) {
        target_out.resize(static_cast<size_t>(target_.output_dim()));
        target_.forward(bootstrap_obs, target_out);
    }

    switch (kind_) {
        case AgentKind::DqnClip:
        case AgentKind::DqnUnclipped: {
            double next_max = 0.0;
            if (!terminal) next_max = *std::max_element(target_out.begin(), target_out.end());
            targets.scalar_target = scalar_sum + (terminal ? 0.0 : gamma_pow * next_max);
            targets.true_target = targets.scalar_target;
            break;
        }
        case AgentKind::DqnTc: {
            double bootstrap = 0.0;
            if (!terminal) {
                const double next_max =
                    *std::max_element(target_out.begin(), target_out.end());
                bootstrap = gamma_pow * unsquash(next_max, cfg_.squash);
            }
            targets.scalar_target = squash(scalar_sum + bootstrap, cfg_.squash);
            targets.true_target = scalar_sum + bootstrap;
            break;
        }
        case AgentKind::PopArt: {
            double next_max = 0.0;
            if (!terminal) {
                next_max = popart_stats_.denormalize(target_out[0]);
                for (size_t j = 1; j < target_out.size(); ++j)
                    next_max = std::max(next_max, popart_stats_.denormalize(target_out[j]));
            }
            targets.scalar_target = scalar_sum + (terminal ? 0.0 : gamma_pow * next_max);
            targets.true_target = targets.scalar_target;
            break;
        }
        default: {  // spectral kinds
            targets.spectral_targets.resize(static_cast<size_t>(comps));
            int shared_action = -1;
            if (!terminal && cfg_.shared_argmax) {
                std::vector<double> agg(static_cast<size_t>(num_actions_), 0.0);
                double weight = 1.0;
                for (int i = 0; i < comps; ++i) {
                    for (int a = 0; a < num_actions_; ++a)
                        agg[static_cast<size_t>(a)] +=
                            weight * target_out[static_cast<size_t>(i * num_actions_ + a)];
                    weight *= cfg_.codec.base;
                }
                shared_action = argmax_tiebreak_low(agg);
            }
            double sum_true = 0.0;
            double weight = 1.0;
            for (int i = 0; i < comps; ++i) {
                double bootstrap = 0.0;
                if (!terminal) {
                    if (cfg_.shared_argmax) {
                        bootstrap = target_out[static_cast<size_t>(i * num_actions_ + shared_action)];
                    } else {
                        bootstrap = target_out[static_cast<size_t>(i * num_actions_)];
                        for (int a = 1; a < num_actions_; ++a)
                            bootstrap = std::max(
                                bootstrap, target_out[static_cast<size_t>(i * num_actions_ + a)]);
                    }
                }
                const double y = spectral_sums[static_cast<size_t>(i)] +
                                 (terminal ? 0.0 : gamma_pow * bootstrap);
                targets.spectral_targets[static_cast<size_t>(i)] = y;
                sum_true += weight * y;
                weight *= cfg_.codec.base;
            }
            targets.true_target = sum_true;
            break;
        }
    }
    return targets;
}

ProbeSample Agent::probe_segment(const NStepSegment& segment) const {
    const Transition& first = replay_.at(segment.start_index);
    ProbeSample sample;
    sample.q_pred = true_value(online_, first.obs, first.action);
    sample.q_target = compute_targets(segment).true_target;
    sample.bucket = first.score_bucket;
    return sample;
}

void Agent::popart_rescale(double old_mean, double old_sigma) {
    for (Mlp* net : {&online_, &target_})
        rescale_final_layer(*net, old_mean, old_sigma, popart_stats_.mean,
                            popart_stats_.sigma());
}

TrainMetrics Agent::train_step() {
    if (!ready()) throw std::logic_error("Agent::train_step: replay not warm yet");

    const int batch = cfg_.batch_size;
    std::vector<NStepSegment> segments;
    segments.reserve(static_cast<size_t>(batch));
    for (int k = 0; k < batch; ++k)
        segments.push_back(replay_.sample_segment(cfg_.n_step, rng_));

    std::vector<SegmentTargets> targets;
    targets.reserve(segments.size());
    for (const NStepSegment& segment : segments) targets.push_back(compute_targets(segment));

    TrainMetrics metrics;
    const double target_bound = 1.0 / (1.0 - cfg_.gamma);

    if (is_spectral(kind_)) {
        // Per-frequency target statistics feed the loss weights; update them
        // from this batch before computing the weights.
        const int comps = cfg_.codec.num_components();
        std::vector<double> freq_targets(segments.size());
        for (int i = 0; i < comps; ++i) {
            for (size_t k = 0; k < segments.size(); ++k) {
                const double y = targets[k].spectral_targets[static_cast<size_t>(i)];
                freq_targets[k] = y;
                if (std::abs(y) > target_bound * (1.0 + 1e-9))
                    ++metrics.target_bound_violations;
            }
            sigma_[static_cast<size_t>(i)].update(freq_targets);
        }
    }

    if (kind_ == AgentKind::PopArt) {
        const double old_mean = popart_stats_.mean;
        const double old_sigma = popart_stats_.sigma();
        std::vector<double> batch_targets(targets.size());
        for (size_t k = 0; k < targets.size(); ++k) batch_targets[k] = targets[k].scalar_target;
        popart_stats_.update(batch_targets);
        popart_rescale(old_mean, old_sigma);
    }

    std::fill(grads_.begin(), grads_.end(), 0.0);
    const int output_dim = online_.output_dim();
    std::vector<double> out_delta(static_cast<size_t>(output_dim));
    std::vector<double> hidden_scale;
    if (is_spectral(kind_)) {
        hidden_scale.resize(static_cast<size_t>(output_dim));
        for (int i = 0; i < online_.heads(); ++i)
            for (int a = 0; a < num_actions_; ++a)
                hidden_scale[static_cast<size_t>(i * num_actions_ + a)] = loss_weight(i);
    }

    Mlp::Cache cache;
    const double inv_batch = 1.0 / batch;
    for (size_t k = 0; k < segments.size(); ++k) {
        const Transition& first = replay_.at(segments[k].start_index);
        online_.forward(first.obs, cache);
        const std::vector<double>& pred = cache.post.back();
        std::fill(out_delta.begin(), out_delta.end(), 0.0);

        double true_pred = 0.0;
        if (is_spectral(kind_)) {
            double weight = 1.0;
            for (int i = 0; i < online_.heads(); ++i) {
                const size_t j = static_cast<size_t>(i * num_actions_ + first.action);
                const double err = pred[j] - targets[k].spectral_targets[static_cast<size_t>(i)];
                out_delta[j] = err * inv_batch;
                metrics.loss += 0.5 * loss_weight(i) * err * err * inv_batch;
                true_pred += weight * pred[j];
                weight *= cfg_.codec.base;
            }
        } else {
            const size_t j = static_cast<size_t>(first.action);
            double y = targets[k].scalar_target;
            if (kind_ == AgentKind::PopArt) y = popart_stats_.normalize(y);
            const double err = pred[j] - y;
            out_delta[j] = err * inv_batch;
            metrics.loss += 0.5 * err * err * inv_batch;
            switch (kind_) {
                case AgentKind::DqnTc: true_pred = unsquash(pred[j], cfg_.squash); break;
                case AgentKind::PopArt: true_pred = popart_stats_.denormalize(pred[j]); break;
                default: true_pred = pred[j]; break;
            }
        }
        metrics.mean_abs_td += std::abs(true_pred - targets[k].true_target) * inv_batch;

        online_.backward(cache, out_delta, hidden_scale, grads_);
    }

    adam_.step(online_.params(), grads_);
    ++train_steps_;
    if (train_steps_ % cfg_.target_refresh == 0)
        std::copy(online_.params().begin(), online_.params().end(), target_.params().begin());
    return metrics;
}

}  // namespace spectral
