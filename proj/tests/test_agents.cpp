#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "spectral_rl/agent.hpp"

using namespace spectral;

namespace {

AgentConfig small_config(std::uint64_t seed) {
    AgentConfig cfg;
    cfg.hidden = {16, 16};
    cfg.replay_capacity = 4096;
    cfg.batch_size = 8;
    cfg.warmup = 32;
    cfg.target_refresh = 16;
    cfg.seed = seed;
    return cfg;
}

Observation make_obs(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> draw(0.0, 1.0);
    Observation obs;
    for (double& v : obs) v = draw(rng);
    return obs;
}

Transition make_transition(std::mt19937_64& rng, double reward, bool terminal) {
    Transition t;
    t.obs = make_obs(rng);
    t.next_obs = make_obs(rng);
    t.action = std::uniform_int_distribution<int>(0, 2)(rng);
    t.reward = reward;
    t.terminal = terminal;
    return t;
}

void fill_replay(Agent& agent, std::mt19937_64& rng, int count, double reward_bound) {
    std::uniform_real_distribution<double> reward(-reward_bound, reward_bound);
    for (int k = 0; k < count; ++k)
        agent.observe(make_transition(rng, reward(rng), k % 17 == 16));
}

}  // namespace

TEST_CASE("agent kind names round trip") {
    for (const char* name : {"dqn_clip", "dqn_unclipped", "dqn_tc", "popart", "spectral",
                             "spectral_exp_weights", "spectral_flat_weights"}) {
        CHECK(to_string(agent_kind_from_name(name)) == name);
    }
    CHECK_THROWS_AS(agent_kind_from_name("rainbow"), std::invalid_argument);
    CHECK(is_spectral(AgentKind::Spectral));
    CHECK(is_spectral(AgentKind::SpectralFlatWeights));
    CHECK_FALSE(is_spectral(AgentKind::PopArt));
}

TEST_CASE("config validation") {
    AgentConfig cfg = small_config(0);
    cfg.gamma = 1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = small_config(0);
    cfg.n_step = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = small_config(0);
    cfg.train_period = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    CHECK_NOTHROW(small_config(0).validate());
}

TEST_CASE("epsilon decays linearly to its floor") {
    Agent agent(AgentKind::DqnUnclipped, small_config(1), kObsDim, 3);
    const AgentConfig& cfg = agent.config();
    CHECK(agent.epsilon_at(0) == cfg.eps_start);
    CHECK(agent.epsilon_at(cfg.eps_decay_frames / 2) ==
          doctest::Approx((cfg.eps_start + cfg.eps_final) / 2).epsilon(1e-12));
    CHECK(agent.epsilon_at(cfg.eps_decay_frames) == cfg.eps_final);
    CHECK(agent.epsilon_at(10 * cfg.eps_decay_frames) == cfg.eps_final);
}

TEST_CASE("replay ring keeps logical order and cuts segments at terminals") {
    ReplayBuffer buffer(4);
    std::mt19937_64 rng(2);
    for (int k = 0; k < 6; ++k) {
        Transition t = make_transition(rng, static_cast<double>(k), k == 3);
        buffer.push(t);
    }
    CHECK(buffer.size() == 4);
    // Oldest surviving transition carries reward 2.
    CHECK(buffer.at(0).reward == 2.0);
    CHECK(buffer.at(3).reward == 5.0);

    const NStepSegment cut = buffer.segment_at(0, 3);
    CHECK(cut.length == 2);  // rewards 2, 3 — transition 3 was terminal
    CHECK(cut.terminal);

    const NStepSegment open = buffer.segment_at(2, 2);
    CHECK(open.length == 2);
    CHECK_FALSE(open.terminal);

    ReplayBuffer empty(4);
    std::mt19937_64 sample_rng(3);
    CHECK_THROWS_AS(empty.sample_segment(1, sample_rng), std::logic_error);
    CHECK_THROWS_AS(ReplayBuffer(0), std::invalid_argument);
}

TEST_CASE("clipped DQN targets saturate large terminal rewards") {
    Agent agent(AgentKind::DqnClip, small_config(5), kObsDim, 3);
    std::mt19937_64 rng(5);
    agent.observe(make_transition(rng, 1000.0, true));
    const ProbeSample probe = agent.probe_segment(agent.replay().segment_at(0, 3));
    CHECK(probe.q_target == 1.0);
}

TEST_CASE("unclipped n-step target sums discounted rewards") {
    Agent agent(AgentKind::DqnUnclipped, small_config(7), kObsDim, 3);
    std::mt19937_64 rng(7);
    agent.observe(make_transition(rng, 1.0, false));
    agent.observe(make_transition(rng, 1.0, false));
    agent.observe(make_transition(rng, 1.0, true));
    const double g = agent.config().gamma;
    const ProbeSample probe = agent.probe_segment(agent.replay().segment_at(0, 3));
    CHECK(probe.q_target == doctest::Approx(1.0 + g + g * g).epsilon(1e-15));
}

TEST_CASE("compressed targets report true-space values") {
    Agent agent(AgentKind::DqnTc, small_config(9), kObsDim, 3);
    std::mt19937_64 rng(9);
    agent.observe(make_transition(rng, 3.0, true));
    const ProbeSample probe = agent.probe_segment(agent.replay().segment_at(0, 1));
    CHECK(probe.q_target == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("fresh pop-art stats leave targets unscaled") {
    Agent agent(AgentKind::PopArt, small_config(11), kObsDim, 3);
    std::mt19937_64 rng(11);
    agent.observe(make_transition(rng, 7.0, true));
    const ProbeSample probe = agent.probe_segment(agent.replay().segment_at(0, 1));
    CHECK(probe.q_target == 7.0);
}

TEST_CASE("spectral terminal target recombines to the raw reward") {
    AgentConfig cfg = small_config(13);
    cfg.codec = {2.0, 3};
    Agent agent(AgentKind::SpectralFlatWeights, cfg, kObsDim, 3);
    std::mt19937_64 rng(13);
    agent.observe(make_transition(rng, 11.0, true));
    const ProbeSample probe = agent.probe_segment(agent.replay().segment_at(0, 1));
    CHECK(probe.q_target == 11.0);  // 1*1 + 2*1 + 4*1 + 8*0.5

    // With a zero-initialized final layer the bootstrap contributes nothing,
    // so even a non-terminal segment keeps the pure reward sum.
    agent.observe(make_transition(rng, 6.5, false));
    const ProbeSample open = agent.probe_segment(agent.replay().segment_at(1, 1));
    CHECK(open.q_target == doctest::Approx(6.5).epsilon(1e-15));
    CHECK(open.q_pred == 0.0);
}

TEST_CASE("compressed-value greedy matches the raw-output argmax") {
    Agent agent(AgentKind::DqnTc, small_config(15), kObsDim, 3);
    std::mt19937_64 rng(15);
    for (int k = 0; k < 200; ++k) {
        const Observation obs = make_obs(rng);
        const std::vector<double> values = agent.head_values(obs);
        const int raw_argmax = static_cast<int>(
            std::max_element(values.begin(), values.end()) - values.begin());
        CHECK(agent.select_action(obs, 0.0) == raw_argmax);
    }
}

TEST_CASE("exploration covers every action") {
    Agent agent(AgentKind::DqnUnclipped, small_config(17), kObsDim, 3);
    std::mt19937_64 rng(17);
    const Observation obs = make_obs(rng);
    std::vector<int> counts(3, 0);
    for (int k = 0; k < 300; ++k) ++counts[static_cast<size_t>(agent.select_action(obs, 1.0))];
    for (int c : counts) CHECK(c > 0);
}

TEST_CASE("training requires a warm replay") {
    Agent agent(AgentKind::DqnUnclipped, small_config(19), kObsDim, 3);
    CHECK_FALSE(agent.ready());
    CHECK_THROWS_AS(agent.train_step(), std::logic_error);
    std::mt19937_64 rng(19);
    fill_replay(agent, rng, 64, 1.0);
    CHECK(agent.ready());
    CHECK_NOTHROW(agent.train_step());
    CHECK(agent.train_steps() == 1);
}

TEST_CASE("zero rewards and a zero-initialized net give zero loss and no update") {
    AgentConfig cfg = small_config(21);
    cfg.codec = {2.0, 4};
    Agent agent(AgentKind::SpectralFlatWeights, cfg, kObsDim, 3);
    std::mt19937_64 rng(21);
    fill_replay(agent, rng, 64, 0.0);

    const std::vector<double> before(agent.network().params().begin(),
                                     agent.network().params().end());
    for (int k = 0; k < 5; ++k) {
        const TrainMetrics metrics = agent.train_step();
        CHECK(metrics.loss == 0.0);
        CHECK(metrics.mean_abs_td == 0.0);
        CHECK(metrics.target_bound_violations == 0);
    }
    CHECK(std::equal(before.begin(), before.end(), agent.network().params().begin()));
}

TEST_CASE("heads above the reward range stay exactly dormant while training") {
    AgentConfig cfg = small_config(23);
    cfg.codec = {2.0, 20};
    Agent agent(AgentKind::Spectral, cfg, kObsDim, 3);
    CHECK(agent.num_heads() == 21);

    std::mt19937_64 rng(23);
    fill_replay(agent, rng, 256, 15.0);  // frequencies >= 4 never activate
    for (int step = 0; step < 100; ++step) {
        agent.train_step();
        if (step % 10 != 0) continue;
        const std::vector<double> values = agent.head_values(make_obs(rng));
        for (int i = 4; i < agent.num_heads(); ++i)
            for (int a = 0; a < 3; ++a)
                CHECK(values[static_cast<size_t>(i * 3 + a)] == 0.0);
    }
}

TEST_CASE("spectral targets stay inside the discounted bound") {
    AgentConfig cfg = small_config(25);
    cfg.codec = {2.0, 20};
    Agent agent(AgentKind::Spectral, cfg, kObsDim, 3);
    std::mt19937_64 rng(25);
    fill_replay(agent, rng, 256, 1e6);
    long violations = 0;
    for (int step = 0; step < 50; ++step) violations += agent.train_step().target_bound_violations;
    CHECK(violations == 0);
}

TEST_CASE("identical seeds give identical training trajectories") {
    auto run = [](std::uint64_t seed) {
        AgentConfig cfg = small_config(seed);
        Agent agent(AgentKind::Spectral, cfg, kObsDim, 3);
        std::mt19937_64 rng(101);  // transition stream independent of agent seed
        fill_replay(agent, rng, 128, 15.0);
        std::vector<double> losses;
        for (int k = 0; k < 20; ++k) losses.push_back(agent.train_step().loss);
        return std::pair(losses, std::vector<double>(agent.network().params().begin(),
                                                     agent.network().params().end()));
    };
    const auto [loss_a, params_a] = run(33);
    const auto [loss_b, params_b] = run(33);
    const auto [loss_c, params_c] = run(34);
    CHECK(loss_a == loss_b);
    CHECK(params_a == params_b);
    CHECK(params_a != params_c);
}

TEST_CASE("single-frequency agent reduces to unclipped DQN bit for bit") {
    AgentConfig cfg = small_config(41);
    cfg.codec = {2.0, 0};
    Agent spectral_agent(AgentKind::SpectralFlatWeights, cfg, kObsDim, 3);
    Agent dqn_agent(AgentKind::DqnUnclipped, cfg, kObsDim, 3);
    REQUIRE(spectral_agent.network().num_params() == dqn_agent.network().num_params());
    spectral_agent.set_network_params(dqn_agent.network().params());

    std::mt19937_64 stream(43);
    std::uniform_real_distribution<double> reward(-1.0, 1.0);
    for (int frame = 0; frame < 400; ++frame) {
        const Observation obs = make_obs(stream);
        const double eps = spectral_agent.epsilon_at(frame);
        const int action_a = spectral_agent.select_action(obs, eps);
        const int action_b = dqn_agent.select_action(obs, eps);
        CHECK(action_a == action_b);

        Transition t = make_transition(stream, reward(stream), frame % 23 == 22);
        t.obs = obs;
        t.action = action_a;
        spectral_agent.observe(t);
        dqn_agent.observe(t);

        if (spectral_agent.ready() && frame % 4 == 0) {
            const TrainMetrics ma = spectral_agent.train_step();
            const TrainMetrics mb = dqn_agent.train_step();
            CHECK(ma.loss == mb.loss);
            CHECK(ma.mean_abs_td == mb.mean_abs_td);
        }
    }
    const auto pa = spectral_agent.network().params();
    const auto pb = dqn_agent.network().params();
    CHECK(std::equal(pa.begin(), pa.end(), pb.begin()));
}

TEST_CASE("frozen pop-art statistics reduce to unclipped DQN bit for bit") {
    AgentConfig cfg = small_config(47);
    cfg.stats_decay = 0.0;  // stats stay at mean 0, sigma 1
    Agent popart_agent(AgentKind::PopArt, cfg, kObsDim, 3);
    Agent dqn_agent(AgentKind::DqnUnclipped, cfg, kObsDim, 3);

    std::mt19937_64 stream(49);
    std::uniform_real_distribution<double> reward(-5.0, 5.0);
    for (int frame = 0; frame < 300; ++frame) {
        const Observation obs = make_obs(stream);
        const int action_a = popart_agent.select_action(obs, 0.1);
        const int action_b = dqn_agent.select_action(obs, 0.1);
        CHECK(action_a == action_b);

        Transition t = make_transition(stream, reward(stream), frame % 19 == 18);
        t.obs = obs;
        t.action = action_a;
        popart_agent.observe(t);
        dqn_agent.observe(t);

        if (popart_agent.ready() && frame % 4 == 0) {
            popart_agent.train_step();
            dqn_agent.train_step();
        }
    }
    const auto pa = popart_agent.network().params();
    const auto pb = dqn_agent.network().params();
    CHECK(std::equal(pa.begin(), pa.end(), pb.begin()));
}

TEST_CASE("loss weights follow the configured mode") {
    AgentConfig cfg = small_config(51);
    cfg.codec = {2.0, 3};
    Agent flat(AgentKind::SpectralFlatWeights, cfg, kObsDim, 3);
    Agent expw(AgentKind::SpectralExpWeights, cfg, kObsDim, 3);
    Agent invvar(AgentKind::Spectral, cfg, kObsDim, 3);
    for (int i = 0; i < 4; ++i) {
        CHECK(flat.loss_weight(i) == 1.0);
        CHECK(expw.loss_weight(i) == std::pow(2.0, i));
    }
    // Fresh stats sit at sigma 1, so inverse variance starts flat too.
    CHECK(invvar.loss_weight(0) == 1.0);
}
