#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spectral_rl/agent.hpp"
#include "spectral_rl/env.hpp"
#include "spectral_rl/harness.hpp"

namespace spectral {

// Everything needed to reproduce a run. Serialized verbatim as the JSON
// sidecar next to each run's CSV.
struct ExperimentConfig {
    std::string preset = "desk";
    std::string agent = "spectral";
    std::string env = "exp_catch";
    long frames = 200000;
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    CatchCoreConfig core;
    AgentConfig agent_cfg;
    TelemetryConfig telemetry;

    bool operator==(const ExperimentConfig& other) const;
    void validate() const;
};

// Built-in presets:
//   desk  - defaults tuned for ~10^5-step runs on the catch games
//   paper - b=2, N=20, gamma=0.99^(1/3), n=3, eps_final=0.01, Adam lr 2.5e-5
ExperimentConfig preset_config(const std::string& name);

std::string serialize_config(const ExperimentConfig& cfg);
ExperimentConfig parse_config(const std::string& json_text);

ExperimentConfig load_config_file(const std::string& path);
void save_config_file(const ExperimentConfig& cfg, const std::string& path);

// Output root: SPECTRAL_RL_OUT if set, else "./runs".
std::string output_root();

}  // namespace spectral
