#include "spectral_rl/env.hpp"

#include <algorithm>
#include <cmath>

namespace spectral {

void CatchCoreConfig::validate() const {
    if (width < 3) throw std::invalid_argument("CatchCoreConfig: width must be >= 3");
    if (height < 2) throw std::invalid_argument("CatchCoreConfig: height must be >= 2");
    if (score_cap < 1) throw std::invalid_argument("CatchCoreConfig: score_cap must be >= 1");
}

CatchEnv::CatchEnv(Variant variant, CatchCoreConfig core, TwoPhaseConfig two_phase,
                   std::uint64_t seed)
    : variant_(variant), core_(core), two_phase_(two_phase) {
    core_.validate();
    reset(seed);
}

void CatchEnv::respawn_ball() {
    std::uniform_int_distribution<int> col(0, core_.width - 1);
    ball_col_ = col(rng_);
    ball_row_ = 0;
}

void CatchEnv::begin_episode() {
    player_score_ = 0;
    opponent_score_ = 0;
    phase_b_catches_ = 0;
    phase_ = (variant_ == Variant::TwoPhase && two_phase_.reversed) ? Phase::B : Phase::A;
    paddle_col_ = core_.width / 2;
    terminal_ = false;
    respawn_ball();
}

Observation CatchEnv::reset(std::uint64_t seed) {
    rng_.seed(seed);
    begin_episode();
    return observation();
}

Observation CatchEnv::reset() {
    begin_episode();
    return observation();
}

Observation CatchEnv::observation() const {
    double score_norm;
    if (phase_ == Phase::B)
        score_norm = static_cast<double>(phase_b_catches_) /
                     std::max(1, two_phase_.phase_b_catch_cap);
    else
        score_norm = static_cast<double>(player_score_) / core_.score_cap;
    return {static_cast<double>(ball_col_) / (core_.width - 1),
            static_cast<double>(ball_row_) / (core_.height - 1),
            static_cast<double>(paddle_col_) / (core_.width - 1),
            std::min(score_norm, 1.0),
            phase_ == Phase::B ? 1.0 : 0.0};
}

double CatchEnv::max_reward_magnitude() const {
    switch (variant_) {
        case Variant::ExponentialCatch:
            return std::pow(2.0, core_.score_cap - 1);
        case Variant::TwoPhase:
            return std::max(1.0, std::abs(two_phase_.phase_b_reward));
        case Variant::PlainCatch:
            return 1.0;
    }
    return 1.0;
}

StepResult CatchEnv::step(int action) {
    if (terminal_) throw StepAfterTerminal();
    if (action < 0 || action >= kNumActions)
        throw std::invalid_argument("CatchEnv: action out of range");

    paddle_col_ = std::clamp(paddle_col_ + (action - 1), 0, core_.width - 1);
    ++ball_row_;

    StepResult result;
    if (ball_row_ == core_.height - 1) {
        const bool caught = (paddle_col_ == ball_col_);
        result.info.unexponentiated_delta = caught ? 1 : -1;
        switch (variant_) {
            case Variant::ExponentialCatch: {
                const double scale = std::pow(2.0, player_score_);
                result.reward = caught ? scale : -scale;
                caught ? ++player_score_ : ++opponent_score_;
                terminal_ = player_score_ >= core_.score_cap ||
                            opponent_score_ >= core_.score_cap;
                break;
            }
            case Variant::PlainCatch: {
                result.reward = caught ? 1.0 : -1.0;
                caught ? ++player_score_ : ++opponent_score_;
                terminal_ = player_score_ >= core_.score_cap ||
                            opponent_score_ >= core_.score_cap;
                break;
            }
            case Variant::TwoPhase: {
                if (phase_ == Phase::A) {
                    result.reward = caught ? 1.0 : -1.0;
                    caught ? ++player_score_ : ++opponent_score_;
                    if (caught && player_score_ >= two_phase_.switch_score &&
                        !two_phase_.reversed)
                        phase_ = Phase::B;
                    terminal_ = player_score_ >= core_.score_cap ||
                                opponent_score_ >= core_.score_cap;
                } else {
                    if (caught) {
                        result.reward = two_phase_.phase_b_reward;
                        ++phase_b_catches_;
                        terminal_ = phase_b_catches_ >= two_phase_.phase_b_catch_cap;
                    } else {
                        // Losing the single phase-B life ends the episode,
                        // or drops back to phase A in the reversed variant.
                        result.reward = 0.0;
                        if (two_phase_.reversed)
                            phase_ = Phase::A;
                        else
                            terminal_ = true;
                    }
                }
                break;
            }
        }
        if (!terminal_) respawn_ball();
    }

    result.observation = observation();
    result.terminal = terminal_;
    result.info.player_score = player_score_;
    result.info.opponent_score = opponent_score_;
    result.info.phase = phase_;
    return result;
}

int TabularMDP::sample_next(int s, int a, std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double u = unit(rng);
    double acc = 0.0;
    for (int s2 = 0; s2 < num_states; ++s2) {
        acc += transition(s, a, s2);
        if (u <= acc) return s2;
    }
    return num_states - 1;
}

TabularMDP generate_tabular_mdp(int num_states, int num_actions, double reward_bound,
                                std::uint64_t seed, int horizon) {
    if (num_states < 1 || num_actions < 1)
        throw std::invalid_argument("generate_tabular_mdp: sizes must be positive");
    TabularMDP mdp;
    mdp.num_states = num_states;
    mdp.num_actions = num_actions;
    mdp.horizon = horizon;
    mdp.transitions.resize(static_cast<size_t>(num_states) * num_actions * num_states);
    mdp.rewards.resize(static_cast<size_t>(num_states) * num_actions);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int s = 0; s < num_states; ++s) {
        for (int a = 0; a < num_actions; ++a) {
            double* row = &mdp.transitions[(static_cast<size_t>(s) * num_actions + a) *
                                           num_states];
            double sum = 0.0;
            for (int s2 = 0; s2 < num_states; ++s2) {
                row[s2] = unit(rng) + 1e-3;
                sum += row[s2];
            }
            for (int s2 = 0; s2 < num_states; ++s2) row[s2] /= sum;
            mdp.rewards[static_cast<size_t>(s) * num_actions + a] =
                (2.0 * unit(rng) - 1.0) * reward_bound;
        }
    }
    mdp.start_state = std::uniform_int_distribution<int>(0, num_states - 1)(rng);
    return mdp;
}

TabularEnv::TabularEnv(TabularMDP mdp, std::uint64_t seed) : mdp_(std::move(mdp)) {
    reset(seed);
}

Observation TabularEnv::reset(std::uint64_t seed) {
    rng_.seed(seed);
    return reset();
}

Observation TabularEnv::reset() {
    state_ = mdp_.start_state;
    steps_ = 0;
    terminal_ = false;
    return observation();
}

Observation TabularEnv::observation() const {
    const double denom = std::max(1, mdp_.num_states - 1);
    return {static_cast<double>(state_) / denom, 0.0, 0.0, 0.0, 0.0};
}

double TabularEnv::max_reward_magnitude() const {
    double m = 0.0;
    for (double r : mdp_.rewards) m = std::max(m, std::abs(r));
    return m;
}

StepResult TabularEnv::step(int action) {
    if (terminal_) throw StepAfterTerminal();
    if (action < 0 || action >= mdp_.num_actions)
        throw std::invalid_argument("TabularEnv: action out of range");
    StepResult result;
    result.reward = mdp_.reward(state_, action);
    state_ = mdp_.sample_next(state_, action, rng_);
    ++steps_;
    terminal_ = (mdp_.horizon > 0 && steps_ >= mdp_.horizon);
    result.observation = observation();
    result.terminal = terminal_;
    return result;
}

std::unique_ptr<Env> make_env(const std::string& name, const CatchCoreConfig& core,
                              std::uint64_t seed) {
    TwoPhaseConfig tp;
    if (name == "exp_catch")
        return std::make_unique<CatchEnv>(CatchEnv::Variant::ExponentialCatch, core, seed);
    if (name == "plain_catch")
        return std::make_unique<CatchEnv>(CatchEnv::Variant::PlainCatch, core, seed);
    if (name == "two_phase")
        return std::make_unique<CatchEnv>(CatchEnv::Variant::TwoPhase, core, tp, seed);
    if (name == "two_phase_easier") {
        tp.phase_b_reward = 100;
        return std::make_unique<CatchEnv>(CatchEnv::Variant::TwoPhase, core, tp, seed);
    }
    if (name == "two_phase_even_easier") {
        tp.phase_b_reward = 10;
        return std::make_unique<CatchEnv>(CatchEnv::Variant::TwoPhase, core, tp, seed);
    }
    if (name == "two_phase_reverse") {
        tp.reversed = true;
        return std::make_unique<CatchEnv>(CatchEnv::Variant::TwoPhase, core, tp, seed);
    }
    if (name == "tabular_random")
        return std::make_unique<TabularEnv>(generate_tabular_mdp(10, 3, 1.0, seed), seed);
    throw std::invalid_argument("unknown environment name: " + name);
}

bool is_env_name(const std::string& name) {
    static const char* names[] = {"exp_catch",        "two_phase",
                                  "two_phase_easier", "two_phase_even_easier",
                                  "two_phase_reverse", "plain_catch",
                                  "tabular_random"};
    return std::find(std::begin(names), std::end(names), name) != std::end(names);
}

}  // namespace spectral
