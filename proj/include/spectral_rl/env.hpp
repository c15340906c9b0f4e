#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace spectral {

struct StepAfterTerminal : std::logic_error {
    StepAfterTerminal() : std::logic_error("step() called on a terminal episode") {}
};

enum class Phase { A, B };

// Observation layout: ball column, ball row, paddle column (all normalized),
// current score / cap, phase indicator. Everything in [0, 1].
constexpr int kObsDim = 5;
using Observation = std::array<double, kObsDim>;

struct StepInfo {
    int player_score = 0;
    int opponent_score = 0;
    Phase phase = Phase::A;
    int unexponentiated_delta = 0;  // +1 catch, -1 miss, 0 otherwise
};

struct StepResult {
    Observation observation{};
    double reward = 0.0;  // raw, unclipped
    bool terminal = false;
    StepInfo info;
};

class Env {
  public:
    virtual ~Env() = default;
    virtual Observation reset(std::uint64_t seed) = 0;
    virtual Observation reset() = 0;  // next episode from the internal stream
    virtual StepResult step(int action) = 0;
    virtual Observation observation() const = 0;
    virtual bool terminal() const = 0;
    virtual int num_actions() const = 0;
    virtual int score_cap() const = 0;
    virtual double max_reward_magnitude() const = 0;
};

struct CatchCoreConfig {
    int width = 7;
    int height = 7;
    int score_cap = 21;
    void validate() const;
};

struct TwoPhaseConfig {
    int switch_score = 10;         // phase-A catches needed to enter phase B
    double phase_b_reward = 1000;  // reward per phase-B catch
    int phase_b_catch_cap = 100;   // bounds otherwise endless phase-B episodes
    bool reversed = false;         // start in phase B; first miss drops to phase A
};

// 1-D falling-ball catch game: the ball drops one row per step, the paddle
// moves one column per action, a catch/miss event fires when the ball hits
// the bottom row. Reward rules come from the variant.
class CatchEnv final : public Env {
  public:
    enum class Variant {
        ExponentialCatch,  // catch/miss pays +-2^n at current score n
        TwoPhase,          // +-1 in phase A, +M per catch in phase B
        PlainCatch,        // +-1 throughout (reduction/testing substrate)
    };

    CatchEnv(Variant variant, CatchCoreConfig core, TwoPhaseConfig two_phase, std::uint64_t seed);
    CatchEnv(Variant variant, CatchCoreConfig core, std::uint64_t seed)
        : CatchEnv(variant, core, TwoPhaseConfig{}, seed) {}

    static constexpr int kNumActions = 3;  // left, stay, right

    Observation reset(std::uint64_t seed) override;
    Observation reset() override;
    StepResult step(int action) override;
    Observation observation() const override;
    bool terminal() const override { return terminal_; }
    int num_actions() const override { return kNumActions; }
    int score_cap() const override { return core_.score_cap; }
    double max_reward_magnitude() const override;

    int player_score() const { return player_score_; }
    int opponent_score() const { return opponent_score_; }
    Phase phase() const { return phase_; }
    const CatchCoreConfig& core() const { return core_; }
    int ball_column() const { return ball_col_; }
    int ball_row() const { return ball_row_; }
    int paddle_column() const { return paddle_col_; }

  private:
    void begin_episode();
    void respawn_ball();

    Variant variant_;
    CatchCoreConfig core_;
    TwoPhaseConfig two_phase_;
    std::mt19937_64 rng_;

    int ball_col_ = 0;
    int ball_row_ = 0;
    int paddle_col_ = 0;
    int player_score_ = 0;
    int opponent_score_ = 0;
    int phase_b_catches_ = 0;
    Phase phase_ = Phase::A;
    bool terminal_ = false;
};

// Finite MDP with seeded random dynamics, used by the tabular equivalence
// checks. Rewards are deterministic per (state, action).
struct TabularMDP {
    int num_states = 0;
    int num_actions = 0;
    int start_state = 0;
    int horizon = 0;                  // steps per episode
    std::vector<double> transitions;  // [s * A * S], rows sum to 1
    std::vector<double> rewards;      // [s * A]

    double transition(int s, int a, int s2) const {
        return transitions[(static_cast<size_t>(s) * num_actions + a) * num_states + s2];
    }
    double reward(int s, int a) const {
        return rewards[static_cast<size_t>(s) * num_actions + a];
    }
    int sample_next(int s, int a, std::mt19937_64& rng) const;
};

TabularMDP generate_tabular_mdp(int num_states, int num_actions, double reward_bound,
                                std::uint64_t seed, int horizon = 50);

// Adapter so deep agents can train on a TabularMDP through the Env interface.
// The state index lands normalized in observation slot 0.
class TabularEnv final : public Env {
  public:
    TabularEnv(TabularMDP mdp, std::uint64_t seed);

    Observation reset(std::uint64_t seed) override;
    Observation reset() override;
    StepResult step(int action) override;
    Observation observation() const override;
    bool terminal() const override { return terminal_; }
    int num_actions() const override { return mdp_.num_actions; }
    int score_cap() const override { return 1; }
    double max_reward_magnitude() const override;

    int state() const { return state_; }

  private:
    TabularMDP mdp_;
    std::mt19937_64 rng_;
    int state_ = 0;
    int steps_ = 0;
    bool terminal_ = false;
};

// Environment names exposed through the CLI config:
// exp_catch, two_phase, two_phase_easier, two_phase_even_easier,
// two_phase_reverse, plain_catch, tabular_random.
// Throws std::invalid_argument for unknown names.
std::unique_ptr<Env> make_env(const std::string& name, const CatchCoreConfig& core,
                              std::uint64_t seed);
bool is_env_name(const std::string& name);

}  // namespace spectral
