#include <doctest.h>

#include <cmath>
#include <numeric>

#include "spectral_rl/env.hpp"
#include "spectral_rl/harness.hpp"

using namespace spectral;

namespace {

// Drives one full episode with the scripted perfect policy and returns the
// summed raw reward.
double perfect_episode_return(CatchEnv& env, std::uint64_t seed) {
    Observation obs = env.reset(seed);
    double total = 0.0;
    while (!env.terminal()) {
        const StepResult r = env.step(scripted_catch_action(obs));
        total += r.reward;
        obs = r.observation;
    }
    return total;
}

}  // namespace

TEST_CASE("core config validation") {
    const CatchCoreConfig narrow{2, 7, 21};
    const CatchCoreConfig flat{7, 1, 21};
    const CatchCoreConfig capless{7, 7, 0};
    CHECK_THROWS_AS(narrow.validate(), std::invalid_argument);
    CHECK_THROWS_AS(flat.validate(), std::invalid_argument);
    CHECK_THROWS_AS(capless.validate(), std::invalid_argument);
    CHECK_NOTHROW(CatchCoreConfig().validate());
}

TEST_CASE("episodes are deterministic per seed") {
    CatchEnv a(CatchEnv::Variant::ExponentialCatch, {}, 42);
    CatchEnv b(CatchEnv::Variant::ExponentialCatch, {}, 42);
    a.reset(7);
    b.reset(7);
    std::mt19937_64 actions(1);
    for (int k = 0; k < 500 && !a.terminal(); ++k) {
        const int act = std::uniform_int_distribution<int>(0, 2)(actions);
        const StepResult ra = a.step(act);
        const StepResult rb = b.step(act);
        CHECK(ra.reward == rb.reward);
        CHECK(ra.terminal == rb.terminal);
        CHECK(ra.observation == rb.observation);
        if (ra.terminal) break;
    }
}

TEST_CASE("stepping past the end throws") {
    CatchEnv env(CatchEnv::Variant::PlainCatch, {7, 7, 1}, 3);
    Observation obs = env.reset(3);
    while (!env.terminal()) obs = env.step(scripted_catch_action(obs)).observation;
    CHECK_THROWS_AS(env.step(1), StepAfterTerminal);
    CHECK_NOTHROW(env.reset());
    CHECK_NOTHROW(env.step(1));
}

TEST_CASE("invalid actions are rejected") {
    CatchEnv env(CatchEnv::Variant::PlainCatch, {}, 0);
    CHECK_THROWS_AS(env.step(-1), std::invalid_argument);
    CHECK_THROWS_AS(env.step(3), std::invalid_argument);
}

TEST_CASE("observations stay normalized") {
    CatchEnv env(CatchEnv::Variant::TwoPhase, {}, TwoPhaseConfig{}, 5);
    Observation obs = env.reset(5);
    std::mt19937_64 actions(9);
    for (int k = 0; k < 2000; ++k) {
        if (env.terminal()) obs = env.reset();
        obs = env.step(std::uniform_int_distribution<int>(0, 2)(actions)).observation;
        for (double v : obs) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("plain catch pays +-1 and tracks the unexponentiated delta") {
    CatchEnv env(CatchEnv::Variant::PlainCatch, {7, 7, 5}, 11);
    Observation obs = env.reset(11);
    int catches = 0, misses = 0;
    std::mt19937_64 actions(2);
    while (!env.terminal()) {
        const StepResult r = env.step(std::uniform_int_distribution<int>(0, 2)(actions));
        if (r.info.unexponentiated_delta == 1) {
            ++catches;
            CHECK(r.reward == 1.0);
        } else if (r.info.unexponentiated_delta == -1) {
            ++misses;
            CHECK(r.reward == -1.0);
        } else {
            CHECK(r.reward == 0.0);
        }
        obs = r.observation;
    }
    CHECK((catches == 5 || misses == 5));
    CHECK(env.max_reward_magnitude() == 1.0);
}

TEST_CASE("exponential catch doubles the stake after every catch") {
    CatchEnv env(CatchEnv::Variant::ExponentialCatch, {7, 7, 21}, 13);
    Observation obs = env.reset(13);
    int score_before = 0;
    while (!env.terminal()) {
        const StepResult r = env.step(scripted_catch_action(obs));
        if (r.info.unexponentiated_delta == 1) {
            CHECK(r.reward == std::pow(2.0, score_before));
            score_before = r.info.player_score;
        }
        obs = r.observation;
    }
    CHECK(env.max_reward_magnitude() == std::pow(2.0, 20));
}

TEST_CASE("a perfect exponential-catch episode is worth 2097151") {
    CatchEnv env(CatchEnv::Variant::ExponentialCatch, {7, 7, 21}, 17);
    CHECK(perfect_episode_return(env, 17) == 2097151.0);
    CHECK(env.player_score() == 21);
    CHECK(env.opponent_score() == 0);
}

TEST_CASE("a miss in exponential catch costs the current stake") {
    CatchEnv env(CatchEnv::Variant::ExponentialCatch, {7, 7, 21}, 19);
    Observation obs = env.reset(19);
    // Always move left: eventually a miss happens before any long streak.
    while (!env.terminal()) {
        const StepResult r = env.step(0);
        if (r.info.unexponentiated_delta == -1) {
            CHECK(r.reward == -std::pow(2.0, r.info.player_score));
            return;
        }
        obs = r.observation;
    }
    FAIL("expected a miss under the always-left policy");
}

TEST_CASE("two-phase switches to phase B after the tenth catch") {
    TwoPhaseConfig tp;  // switch at 10, +1000 per phase-B catch
    CatchEnv env(CatchEnv::Variant::TwoPhase, {7, 7, 21}, tp, 23);
    Observation obs = env.reset(23);
    int catches = 0;
    while (!env.terminal()) {
        const StepResult r = env.step(scripted_catch_action(obs));
        if (r.info.unexponentiated_delta == 1) {
            ++catches;
            if (catches <= 10) {
                CHECK(r.reward == 1.0);
                CHECK((r.info.phase == (catches == 10 ? Phase::B : Phase::A)));
            } else {
                CHECK(r.reward == 1000.0);
                CHECK(r.info.phase == Phase::B);
            }
        }
        obs = r.observation;
        if (catches == 15) break;
    }
    CHECK(catches == 15);
    CHECK(env.max_reward_magnitude() == 1000.0);
}

TEST_CASE("a phase-B miss ends the episode with zero reward") {
    TwoPhaseConfig tp;
    CatchEnv env(CatchEnv::Variant::TwoPhase, {7, 7, 21}, tp, 29);
    Observation obs = env.reset(29);
    int catches = 0;
    while (catches < 10) {
        const StepResult r = env.step(scripted_catch_action(obs));
        catches += r.info.unexponentiated_delta == 1;
        obs = r.observation;
    }
    CHECK(env.phase() == Phase::B);
    while (!env.terminal()) {
        const StepResult r = env.step(0);  // drift left until a miss
        if (r.info.unexponentiated_delta == -1) {
            CHECK(r.reward == 0.0);
            CHECK(r.terminal);
        }
    }
}

TEST_CASE("reversed two-phase starts in phase B and demotes on a miss") {
    TwoPhaseConfig tp;
    tp.reversed = true;
    CatchEnv env(CatchEnv::Variant::TwoPhase, {7, 7, 21}, tp, 31);
    Observation obs = env.reset(31);
    CHECK(env.phase() == Phase::B);
    CHECK(obs[4] == 1.0);

    const StepResult first = env.step(scripted_catch_action(obs));
    CHECK(first.info.phase == Phase::B);

    obs = first.observation;
    bool demoted = false;
    while (!env.terminal() && !demoted) {
        const StepResult r = env.step(0);
        if (r.info.unexponentiated_delta == -1) {
            CHECK(r.reward == 0.0);
            CHECK_FALSE(r.terminal);
            CHECK(r.info.phase == Phase::A);
            demoted = true;
        }
        obs = r.observation;
    }
    CHECK(demoted);
}

TEST_CASE("phase-B catches are capped so episodes end") {
    TwoPhaseConfig tp;
    tp.phase_b_catch_cap = 3;
    CatchEnv env(CatchEnv::Variant::TwoPhase, {7, 7, 21}, tp, 37);
    Observation obs = env.reset(37);
    int phase_b_catches = 0;
    while (!env.terminal()) {
        const StepResult r = env.step(scripted_catch_action(obs));
        if (r.info.unexponentiated_delta == 1 && r.reward == 1000.0) ++phase_b_catches;
        obs = r.observation;
    }
    CHECK(phase_b_catches == 3);
}

TEST_CASE("generated tabular MDPs are proper") {
    const TabularMDP mdp = generate_tabular_mdp(8, 3, 15.0, 41);
    CHECK(mdp.num_states == 8);
    CHECK(mdp.num_actions == 3);
    CHECK(mdp.horizon == 50);
    for (int s = 0; s < mdp.num_states; ++s) {
        for (int a = 0; a < mdp.num_actions; ++a) {
            double sum = 0.0;
            for (int s2 = 0; s2 < mdp.num_states; ++s2) {
                CHECK(mdp.transition(s, a, s2) > 0.0);
                sum += mdp.transition(s, a, s2);
            }
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(std::abs(mdp.reward(s, a)) <= 15.0);
        }
    }

    std::mt19937_64 rng(1);
    for (int k = 0; k < 1000; ++k) {
        const int s2 = mdp.sample_next(0, 0, rng);
        CHECK(s2 >= 0);
        CHECK(s2 < mdp.num_states);
    }
}

TEST_CASE("tabular env terminates at the horizon") {
    TabularEnv env(generate_tabular_mdp(5, 2, 1.0, 43, 10), 43);
    env.reset(43);
    int steps = 0;
    while (!env.terminal()) {
        env.step(steps % 2);
        ++steps;
    }
    CHECK(steps == 10);
    CHECK_THROWS_AS(env.step(0), StepAfterTerminal);
}

TEST_CASE("environment registry") {
    const CatchCoreConfig core;
    for (const char* name : {"exp_catch", "two_phase", "two_phase_easier",
                             "two_phase_even_easier", "two_phase_reverse", "plain_catch",
                             "tabular_random"}) {
        CHECK(is_env_name(name));
        auto env = make_env(name, core, 7);
        CHECK(env->num_actions() >= 2);
    }
    CHECK_FALSE(is_env_name("pong"));
    CHECK_THROWS_AS(make_env("pong", core, 7), std::invalid_argument);

    CHECK(make_env("two_phase_easier", core, 7)->max_reward_magnitude() == 100.0);
    CHECK(make_env("two_phase_even_easier", core, 7)->max_reward_magnitude() == 10.0);
}
