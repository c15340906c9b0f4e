#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spectral_rl/agent.hpp"
#include "spectral_rl/env.hpp"

namespace spectral {

struct EpisodeRow {
    long frame = 0;  // frame at which the episode completed
    double raw_return = 0.0;
    double unexp_return = 0.0;  // catches - misses over the episode
    int max_phase = 0;          // 1 if phase B was reached
};

struct TdErrorRow {
    long frame = 0;
    int bucket = 0;
    double value = 0.0;  // percentage TD error (fraction), when valid
    bool valid = false;  // mean |target| above threshold
};

struct RunRecord {
    std::string agent;
    std::string env;
    std::uint64_t seed = 0;
    std::string config_json;  // effective config, serialized verbatim
    std::vector<EpisodeRow> episodes;
    std::vector<TdErrorRow> td_errors;
    double wall_seconds = 0.0;
};

struct TelemetryConfig {
    bool enable_td_probes = true;
    long probe_period = 1000;  // frames between probes
    int probe_samples = 256;
    std::uint64_t probe_seed = 12345;  // dedicated stream; never touches training
};

// Percentage TD error per score bucket, tracked with EMA running means of
// |prediction - target| and |target|. The ratio is a missing datum while
// the mean |target| sits below 1e-12.
class TdErrorTracker {
  public:
    TdErrorTracker(int num_buckets, double decay);

    void add(const ProbeSample& sample);
    std::optional<double> percent_error(int bucket) const;
    int num_buckets() const { return static_cast<int>(abs_error_.size()); }

  private:
    double decay_;
    std::vector<double> abs_error_;
    std::vector<double> abs_target_;
    std::vector<long> counts_;
};

// Acts, stores, trains and logs for `frames` environment steps.
// Fully deterministic given (agent seed, env seed): telemetry probes consume
// their own random stream so enabling them cannot change training.
RunRecord run_training(Agent& agent, Env& env, long frames, std::uint64_t seed,
                       const TelemetryConfig& telemetry = {});

// CSV persistence. One row per logged event:
// frame,event_type,value,bucket,seed,agent,env
void write_run_csv(const RunRecord& record, const std::string& path);
RunRecord read_run_csv(const std::string& path);

struct SummaryCurve {
    std::vector<double> frames;
    std::vector<double> mean;
    std::vector<double> lower;  // mean - bootstrap std
    std::vector<double> upper;
};

// Windowed mean episodic return across seeds with bootstrapped +-1 std bands
// (resampling over seeds).
SummaryCurve aggregate_runs(const std::vector<RunRecord>& records, int window,
                            int resamples = 1000, std::uint64_t seed = 0,
                            bool unexponentiated = false);

// Mean raw (or unexponentiated) return over the last `fraction` of episodes,
// averaged across records. Used by the directional comparisons.
double final_window_score(const std::vector<RunRecord>& records, double fraction,
                          bool unexponentiated);

// Always-correct scripted policy for the catch games: move toward the ball.
int scripted_catch_action(const Observation& obs);

}  // namespace spectral
