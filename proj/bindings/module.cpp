#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "spectral_rl/agent.hpp"
#include "spectral_rl/codec.hpp"
#include "spectral_rl/env.hpp"
#include "spectral_rl/experiment_config.hpp"
#include "spectral_rl/harness.hpp"
#include "spectral_rl/tabular.hpp"
#include "spectral_rl/transforms.hpp"
#include "spectral_rl/verify.hpp"

namespace py = pybind11;
using namespace spectral;

namespace {

CodecConfig make_codec(double base, int max_frequency) {
    CodecConfig cfg{base, max_frequency};
    cfg.validate();
    return cfg;
}

// Thin Env wrapper owning the polymorphic environment.
class PyEnv {
  public:
    PyEnv(const std::string& name, std::uint64_t seed, int width, int height, int score_cap)
        : env_(make_env(name, CatchCoreConfig{width, height, score_cap}, seed)) {}

    std::vector<double> reset(std::optional<std::uint64_t> seed) {
        const Observation obs = seed ? env_->reset(*seed) : env_->reset();
        return {obs.begin(), obs.end()};
    }
    py::tuple step(int action) {
        const StepResult r = env_->step(action);
        return py::make_tuple(std::vector<double>(r.observation.begin(), r.observation.end()),
                              r.reward, r.terminal, r.info.unexponentiated_delta);
    }
    bool terminal() const { return env_->terminal(); }
    int num_actions() const { return env_->num_actions(); }
    double max_reward_magnitude() const { return env_->max_reward_magnitude(); }

    Env& raw() { return *env_; }

  private:
    std::unique_ptr<Env> env_;
};

py::dict record_to_dict(const RunRecord& record) {
    py::list frames, returns, unexp, phases;
    for (const EpisodeRow& e : record.episodes) {
        frames.append(e.frame);
        returns.append(e.raw_return);
        unexp.append(e.unexp_return);
        phases.append(e.max_phase);
    }
    py::dict out;
    out["agent"] = record.agent;
    out["env"] = record.env;
    out["seed"] = record.seed;
    out["episode_frames"] = frames;
    out["episode_returns"] = returns;
    out["episode_unexp_returns"] = unexp;
    out["episode_max_phases"] = phases;
    out["wall_seconds"] = record.wall_seconds;
    return out;
}

py::dict train(const std::string& agent_name, const std::string& env_name, long frames,
               std::uint64_t seed, const py::kwargs& overrides) {
    ExperimentConfig cfg = preset_config("desk");
    cfg.agent = agent_name;
    cfg.env = env_name;
    cfg.frames = frames;
    if (!overrides.empty()) {
        // Route overrides through the JSON config schema so Python callers
        // use the same field names as config files.
        py::module_ json = py::module_::import("json");
        py::dict base = json.attr("loads")(serialize_config(cfg));
        for (auto item : overrides) base[item.first] = item.second;
        cfg = parse_config(py::cast<std::string>(json.attr("dumps")(base)));
    }
    cfg.validate();

    AgentConfig agent_cfg = cfg.agent_cfg;
    agent_cfg.seed = seed;
    auto env = make_env(cfg.env, cfg.core, seed);
    Agent agent(agent_kind_from_name(cfg.agent), agent_cfg, kObsDim, env->num_actions());
    RunRecord record = run_training(agent, *env, cfg.frames, seed, cfg.telemetry);
    record.env = cfg.env;
    return record_to_dict(record);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Spectral reward decomposition RL workbench (C++ core)";

    m.def(
        "decompose",
        [](double r, double base, int max_frequency) {
            return decompose(r, make_codec(base, max_frequency));
        },
        py::arg("r"), py::arg("base") = 2.0, py::arg("max_frequency") = 20,
        "Split a scalar reward into per-frequency components in [-1, 1].");
    m.def(
        "reconstruct",
        [](const std::vector<double>& components, double base) {
            CodecConfig cfg{base, static_cast<int>(components.size()) - 1};
            cfg.validate();
            return reconstruct(components, cfg);
        },
        py::arg("components"), py::arg("base") = 2.0,
        "Recombine components as sum_i base^i * components[i].");
    m.def(
        "max_representable",
        [](double base, int max_frequency) {
            return max_representable(make_codec(base, max_frequency));
        },
        py::arg("base") = 2.0, py::arg("max_frequency") = 20);

    m.def(
        "squash", [](double x, double epsilon) { return squash(x, SquashConfig{epsilon}); },
        py::arg("x"), py::arg("epsilon") = 1e-2,
        "Signed square-root target compression with a linear tail.");
    m.def(
        "unsquash", [](double y, double epsilon) { return unsquash(y, SquashConfig{epsilon}); },
        py::arg("y"), py::arg("epsilon") = 1e-2, "Closed-form inverse of squash.");

    py::class_<PyEnv>(m, "Env")
        .def(py::init<const std::string&, std::uint64_t, int, int, int>(), py::arg("name"),
             py::arg("seed") = 0, py::arg("width") = 7, py::arg("height") = 7,
             py::arg("score_cap") = 21)
        .def("reset", &PyEnv::reset, py::arg("seed") = py::none())
        .def("step", &PyEnv::step, py::arg("action"),
             "Returns (observation, reward, terminal, unexponentiated_delta).")
        .def_property_readonly("terminal", &PyEnv::terminal)
        .def_property_readonly("num_actions", &PyEnv::num_actions)
        .def_property_readonly("max_reward_magnitude", &PyEnv::max_reward_magnitude);

    m.def("env_names", [] {
        return std::vector<std::string>{"exp_catch",        "two_phase",
                                        "two_phase_easier", "two_phase_even_easier",
                                        "two_phase_reverse", "plain_catch",
                                        "tabular_random"};
    });
    m.def("agent_names", [] {
        return std::vector<std::string>{"dqn_clip",        "dqn_unclipped",
                                        "dqn_tc",          "popart",
                                        "spectral",        "spectral_exp_weights",
                                        "spectral_flat_weights"};
    });

    m.def(
        "check_equivalence",
        [](int num_states, int num_actions, double reward_bound, std::uint64_t seed,
           long steps, double base, int max_frequency) {
            const TabularMDP mdp =
                generate_tabular_mdp(num_states, num_actions, reward_bound, seed);
            const EquivalenceReport report =
                check_equivalence(mdp, steps, seed, make_codec(base, max_frequency));
            py::dict out;
            out["max_abs_deviation"] = report.max_abs_deviation;
            out["identical_actions"] = report.identical_actions;
            out["overflow"] = report.overflow;
            out["steps_run"] = report.steps_run;
            return out;
        },
        py::arg("num_states"), py::arg("num_actions"), py::arg("reward_bound"),
        py::arg("seed"), py::arg("steps") = 10000, py::arg("base") = 2.0,
        py::arg("max_frequency") = 3,
        "Run scalar and per-frequency Q-learning side by side on a random MDP.");

    m.def("train", &train, py::arg("agent"), py::arg("env"), py::arg("frames"),
          py::arg("seed") = 1,
          "Train one agent and return its episode log. Extra keyword arguments "
          "override config-file fields (e.g. adam_lr=3e-4).");

    m.def(
        "verify",
        [](const std::string& suite) {
            py::list out;
            for (const CheckResult& r : verify_suite(suite))
                out.append(py::make_tuple(r.name, r.passed, r.detail));
            return out;
        },
        py::arg("suite") = "all", "Run a named oracle suite; returns (name, passed, detail).");
}
