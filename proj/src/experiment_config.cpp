#include "spectral_rl/experiment_config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace spectral {

using nlohmann::json;

bool ExperimentConfig::operator==(const ExperimentConfig& other) const {
    return serialize_config(*this) == serialize_config(other);
}

void ExperimentConfig::validate() const {
    agent_kind_from_name(agent);
    if (!is_env_name(env)) throw std::invalid_argument("unknown environment name: " + env);
    if (frames < 0) throw std::invalid_argument("frames must be >= 0");
    if (seeds.empty()) throw std::invalid_argument("need at least one seed");
    core.validate();
    agent_cfg.validate();
}

ExperimentConfig preset_config(const std::string& name) {
    ExperimentConfig cfg;
    cfg.preset = name;
    if (name == "desk") {
        // Tuned for ~2x10^5-frame runs on the 5-wide board: a plain Adam
        // stabilizer, a faster target sync and a short exploration schedule
        // are what make desk-scale learning possible at all, and the sigma
        // floor keeps inverse-variance loss weights bounded when a frequency
        // has barely fired yet.
        cfg.core.width = 5;
        cfg.agent_cfg.adam.lr = 3e-4;
        cfg.agent_cfg.adam.stabilizer = 1e-8;
        cfg.agent_cfg.target_refresh = 500;
        cfg.agent_cfg.eps_decay_frames = 20000;
        cfg.agent_cfg.eps_final = 0.05;
        cfg.agent_cfg.sigma_min = 0.3;
    } else if (name == "paper") {
        cfg.agent_cfg.codec = {2.0, 20};
        cfg.agent_cfg.gamma = std::pow(0.99, 1.0 / 3.0);
        cfg.agent_cfg.n_step = 3;
        cfg.agent_cfg.eps_final = 0.01;
        cfg.agent_cfg.adam.lr = 2.5e-5;
        cfg.agent_cfg.adam.stabilizer = 0.005 / 32;
    } else {
        throw std::invalid_argument("unknown preset: " + name);
    }
    return cfg;
}

std::string serialize_config(const ExperimentConfig& cfg) {
    json j;
    j["preset"] = cfg.preset;
    j["agent"] = cfg.agent;
    j["env"] = cfg.env;
    j["frames"] = cfg.frames;
    j["seeds"] = cfg.seeds;
    j["env_width"] = cfg.core.width;
    j["env_height"] = cfg.core.height;
    j["score_cap"] = cfg.core.score_cap;

    const AgentConfig& a = cfg.agent_cfg;
    j["gamma"] = a.gamma;
    j["n_step"] = a.n_step;
    j["replay_capacity"] = a.replay_capacity;
    j["batch_size"] = a.batch_size;
    j["target_refresh"] = a.target_refresh;
    j["train_period"] = a.train_period;
    j["warmup"] = a.warmup;
    j["eps_start"] = a.eps_start;
    j["eps_final"] = a.eps_final;
    j["eps_decay_frames"] = a.eps_decay_frames;
    j["hidden"] = a.hidden;
    j["codec_base"] = a.codec.base;
    j["codec_max_frequency"] = a.codec.max_frequency;
    j["squash_epsilon"] = a.squash.epsilon;
    j["stats_decay"] = a.stats_decay;
    j["sigma_min"] = a.sigma_min;
    j["adam_lr"] = a.adam.lr;
    j["adam_beta1"] = a.adam.beta1;
    j["adam_beta2"] = a.adam.beta2;
    j["adam_stabilizer"] = a.adam.stabilizer;
    j["shared_argmax"] = a.shared_argmax;

    j["td_probes"] = cfg.telemetry.enable_td_probes;
    j["probe_period"] = cfg.telemetry.probe_period;
    j["probe_samples"] = cfg.telemetry.probe_samples;
    j["probe_seed"] = cfg.telemetry.probe_seed;
    return j.dump(2);
}

ExperimentConfig parse_config(const std::string& json_text) {
    const json j = json::parse(json_text);
    ExperimentConfig cfg;
    if (j.contains("preset")) cfg = preset_config(j.at("preset").get<std::string>());

    auto get = [&](const char* key, auto& slot) {
        if (j.contains(key)) slot = j.at(key).get<std::decay_t<decltype(slot)>>();
    };
    get("agent", cfg.agent);
    get("env", cfg.env);
    get("frames", cfg.frames);
    get("seeds", cfg.seeds);
    get("env_width", cfg.core.width);
    get("env_height", cfg.core.height);
    get("score_cap", cfg.core.score_cap);

    AgentConfig& a = cfg.agent_cfg;
    get("gamma", a.gamma);
    get("n_step", a.n_step);
    get("replay_capacity", a.replay_capacity);
    get("batch_size", a.batch_size);
    get("target_refresh", a.target_refresh);
    get("train_period", a.train_period);
    get("warmup", a.warmup);
    get("eps_start", a.eps_start);
    get("eps_final", a.eps_final);
    get("eps_decay_frames", a.eps_decay_frames);
    get("hidden", a.hidden);
    get("codec_base", a.codec.base);
    get("codec_max_frequency", a.codec.max_frequency);
    get("squash_epsilon", a.squash.epsilon);
    get("stats_decay", a.stats_decay);
    get("sigma_min", a.sigma_min);
    get("adam_lr", a.adam.lr);
    get("adam_beta1", a.adam.beta1);
    get("adam_beta2", a.adam.beta2);
    get("adam_stabilizer", a.adam.stabilizer);
    get("shared_argmax", a.shared_argmax);

    get("td_probes", cfg.telemetry.enable_td_probes);
    get("probe_period", cfg.telemetry.probe_period);
    get("probe_samples", cfg.telemetry.probe_samples);
    get("probe_seed", cfg.telemetry.probe_seed);
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config(text);
}

void save_config_file(const ExperimentConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write config file: " + path);
    out << serialize_config(cfg) << "\n";
}

std::string output_root() {
    if (const char* env = std::getenv("SPECTRAL_RL_OUT")) return env;
    return "runs";
}

}  // namespace spectral
