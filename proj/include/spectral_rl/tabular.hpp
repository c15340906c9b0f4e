#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spectral_rl/codec.hpp"
#include "spectral_rl/env.hpp"

namespace spectral {

// Standard tabular action-value function, zero-initialized.
class QTable {
  public:
    QTable(int num_states, int num_actions)
        : num_states_(num_states), num_actions_(num_actions),
          q_(static_cast<size_t>(num_states) * num_actions, 0.0) {}

    double& at(int s, int a) { return q_[static_cast<size_t>(s) * num_actions_ + a]; }
    double at(int s, int a) const { return q_[static_cast<size_t>(s) * num_actions_ + a]; }
    int num_states() const { return num_states_; }
    int num_actions() const { return num_actions_; }

  private:
    int num_states_, num_actions_;
    std::vector<double> q_;
};

// Per-frequency action-value table. The scalar value is the weighted sum
// over frequencies, sum_i b^i Q(s, a, i).
class SpectralQTable {
  public:
    SpectralQTable(int num_states, int num_actions, CodecConfig codec)
        : num_states_(num_states), num_actions_(num_actions), codec_(codec),
          q_(static_cast<size_t>(num_states) * num_actions * codec.num_components(), 0.0) {}

    double& at(int s, int a, int i) {
        return q_[(static_cast<size_t>(s) * num_actions_ + a) * codec_.num_components() + i];
    }
    double at(int s, int a, int i) const {
        return q_[(static_cast<size_t>(s) * num_actions_ + a) * codec_.num_components() + i];
    }
    double aggregate(int s, int a) const;
    const CodecConfig& codec() const { return codec_; }
    int num_states() const { return num_states_; }
    int num_actions() const { return num_actions_; }

  private:
    int num_states_, num_actions_;
    CodecConfig codec_;
    std::vector<double> q_;
};

// Argmax over actions; ties broken by lowest action index.
int greedy_action(const QTable& table, int s);
int greedy_action(const SpectralQTable& table, int s);
int argmax_tiebreak_low(std::span<const double> values);

// Watkins Q-learning backup.
void q_backup(QTable& table, int s, int a, double r, int s2, bool terminal,
              double alpha, double gamma);

// Per-frequency backup sharing one greedy next action across frequencies.
void spectral_q_backup(SpectralQTable& table, int s, int a, double r, int s2,
                       bool terminal, double alpha, double gamma);

struct EquivalenceReport {
    double max_abs_deviation = 0.0;  // max over time/state/action of |Q_std - sum b^i Q_spec|
    bool identical_actions = true;
    bool overflow = false;  // reward exceeded the codec bound (Prop. 1 hypothesis violated)
    long steps_run = 0;
};

// Runs standard and spectral Q-learning side by side on the same MDP with a
// shared exploration stream and reports how far their action-values and
// behavior diverge.
EquivalenceReport check_equivalence(const TabularMDP& mdp, long steps, std::uint64_t seed,
                                    const CodecConfig& codec, double alpha = 0.1,
                                    double gamma = 0.95, double epsilon = 0.1);

}  // namespace spectral
