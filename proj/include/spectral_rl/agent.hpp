#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "spectral_rl/codec.hpp"
#include "spectral_rl/env.hpp"
#include "spectral_rl/net.hpp"
#include "spectral_rl/replay.hpp"
#include "spectral_rl/transforms.hpp"

namespace spectral {

enum class AgentKind {
    DqnClip,
    DqnUnclipped,
    DqnTc,
    PopArt,
    Spectral,
    SpectralExpWeights,
    SpectralFlatWeights,
};

AgentKind agent_kind_from_name(const std::string& name);
std::string to_string(AgentKind kind);
bool is_spectral(AgentKind kind);

enum class LossWeightMode { InverseVariance, Exponential, Flat };

struct AgentConfig {
    double gamma = std::pow(0.99, 1.0 / 3.0);
    int n_step = 3;
    size_t replay_capacity = 100000;
    int batch_size = 32;
    int target_refresh = 2000;  // train steps between target-network syncs
    int train_period = 4;       // environment steps per train step
    int warmup = 1000;          // transitions stored before training starts

    double eps_start = 1.0;
    double eps_final = 0.05;
    long eps_decay_frames = 50000;

    std::vector<int> hidden = {128, 128};
    CodecConfig codec;      // spectral agents
    SquashConfig squash;    // target compression
    double stats_decay = 1e-3;
    double sigma_min = 1e-4;
    AdamConfig adam;
    bool shared_argmax = false;  // spectral bootstrap: shared greedy action
                                 // instead of an independent per-frequency max
    std::uint64_t seed = 0;

    void validate() const;
};

struct TrainMetrics {
    double loss = 0.0;
    double mean_abs_td = 0.0;  // true-space TD error magnitude, batch mean
    long target_bound_violations = 0;
};

struct ProbeSample {
    double q_pred = 0.0;    // true-space prediction for the stored action
    double q_target = 0.0;  // true-space bootstrapped target
    int bucket = 0;
};

// A value-based agent: one of the two DQN reward-handling baselines
// (clipping, target compression), Pop-Art, or Spectral DQN with a choice of
// per-frequency loss weighting.
class Agent {
  public:
    Agent(AgentKind kind, AgentConfig cfg, int obs_dim, int num_actions);

    AgentKind kind() const { return kind_; }
    const AgentConfig& config() const { return cfg_; }
    int num_actions() const { return num_actions_; }
    int num_heads() const { return online_.heads(); }

    double epsilon_at(long frame) const;
    int select_action(const Observation& obs, double epsilon);
    void observe(const Transition& transition);
    bool ready() const;
    TrainMetrics train_step();
    long train_steps() const { return train_steps_; }

    // Raw per-head network outputs, laid out [head * actions + action].
    std::vector<double> head_values(const Observation& obs) const;
    // True-space value of the greedy action.
    double greedy_value(const Observation& obs) const;
    // Prediction/target pair for one replay segment, in true space.
    ProbeSample probe_segment(const NStepSegment& segment) const;

    const ReplayBuffer& replay() const { return replay_; }
    ReplayBuffer& replay() { return replay_; }
    Mlp& network() { return online_; }
    const Mlp& network() const { return online_; }
    const RunningStats& popart_stats() const { return popart_stats_; }
    double loss_weight(int frequency) const;

    // Loads parameters into both the online and target networks. Lets two
    // agent kinds with the same network shape start from identical weights.
    void set_network_params(std::span<const double> params);

    void save(const std::string& path_prefix) const { online_.save(path_prefix); }

  private:
    struct SegmentTargets {
        double scalar_target = 0.0;              // non-spectral kinds
        std::vector<double> spectral_targets;    // per frequency
        double true_target = 0.0;                // true-space, telemetry
    };
    SegmentTargets compute_targets(const NStepSegment& segment) const;
    double true_value(const Mlp& net, const Observation& obs, int action) const;
    int true_space_greedy(const Observation& obs) const;
    void popart_rescale(double old_mean, double old_sigma);

    AgentKind kind_;
    AgentConfig cfg_;
    int num_actions_;
    LossWeightMode weight_mode_ = LossWeightMode::Flat;

    Mlp online_;
    Mlp target_;
    Adam adam_;
    ReplayBuffer replay_;
    std::mt19937_64 rng_;

    RunningStats popart_stats_;
    std::vector<RunningStats> sigma_;  // per-frequency target stats

    std::vector<double> grads_;
    long train_steps_ = 0;
};

}  // namespace spectral
