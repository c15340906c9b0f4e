#include <atomic>
#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>
#include <thread>

#include <CLI11.hpp>

#include "spectral_rl/experiment_config.hpp"
#include "spectral_rl/harness.hpp"
#include "spectral_rl/plot.hpp"
#include "spectral_rl/verify.hpp"

namespace fs = std::filesystem;
using namespace spectral;

namespace {

RunRecord execute_run(const ExperimentConfig& cfg, std::uint64_t seed) {
    AgentConfig agent_cfg = cfg.agent_cfg;
    agent_cfg.seed = seed;
    auto env = make_env(cfg.env, cfg.core, seed);
    Agent agent(agent_kind_from_name(cfg.agent), agent_cfg, kObsDim, env->num_actions());
    RunRecord record = run_training(agent, *env, cfg.frames, seed, cfg.telemetry);
    record.env = cfg.env;
    record.config_json = serialize_config(cfg);
    return record;
}

void write_run_outputs(const RunRecord& record, const ExperimentConfig& cfg,
                       const fs::path& dir, std::uint64_t seed) {
    fs::create_directories(dir);
    const std::string stem = cfg.agent + "_" + cfg.env + "_seed" + std::to_string(seed);
    write_run_csv(record, (dir / (stem + ".csv")).string());
    ExperimentConfig effective = cfg;
    effective.seeds = {seed};
    save_config_file(effective, (dir / (stem + ".json")).string());
}

int run_seeds(const ExperimentConfig& cfg, const fs::path& dir, int jobs) {
    cfg.validate();
    std::vector<std::uint64_t> seeds = cfg.seeds;
    std::vector<std::thread> workers;
    std::atomic<size_t> next{0};
    std::mutex io_mutex;
    auto worker = [&] {
        for (size_t k = next.fetch_add(1); k < seeds.size(); k = next.fetch_add(1)) {
            const std::uint64_t seed = seeds[k];
            RunRecord record = execute_run(cfg, seed);
            std::lock_guard<std::mutex> lock(io_mutex);
            write_run_outputs(record, cfg, dir, seed);
            std::cout << cfg.agent << " on " << cfg.env << " seed " << seed << ": "
                      << record.episodes.size() << " episodes, final-window return "
                      << final_window_score({record}, 0.1, false) << "\n";
        }
    };
    const int n_jobs = std::max(1, std::min<int>(jobs, static_cast<int>(seeds.size())));
    for (int j = 0; j < n_jobs; ++j) workers.emplace_back(worker);
    for (std::thread& t : workers) t.join();
    return 0;
}

std::vector<RunRecord> load_records(const std::vector<std::string>& run_dirs) {
    std::vector<RunRecord> records;
    for (const std::string& dir : run_dirs) {
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (entry.path().extension() == ".csv")
                records.push_back(read_run_csv(entry.path().string()));
        }
    }
    return records;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral reward decomposition RL workbench"};
    app.require_subcommand(1);

    // shared run options
    std::string config_path, preset = "desk", agent = "spectral", env_name = "exp_catch";
    std::string out_dir;
    long frames = 200000;
    int num_seeds = 5;
    int jobs = 1;

    auto add_run_options = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file (flags override it)");
        cmd->add_option("--preset", preset, "built-in preset: desk or paper");
        cmd->add_option("--agent", agent,
                        "dqn_clip|dqn_unclipped|dqn_tc|popart|spectral|"
                        "spectral_exp_weights|spectral_flat_weights");
        cmd->add_option("--env", env_name,
                        "exp_catch|two_phase|two_phase_easier|two_phase_even_easier|"
                        "two_phase_reverse|plain_catch|tabular_random");
        cmd->add_option("--frames", frames, "environment steps per seed");
        cmd->add_option("--seeds", num_seeds, "number of seeds (1..n)");
        cmd->add_option("--out", out_dir, "output directory (default SPECTRAL_RL_OUT/<name>)");
        cmd->add_option("--jobs", jobs, "parallel seed workers");
    };

    CLI::App* cmd_run = app.add_subcommand("run", "train one agent across seeds");
    add_run_options(cmd_run);

    CLI::App* cmd_sweep = app.add_subcommand("sweep", "train several agents across seeds");
    std::vector<std::string> sweep_agents = {"spectral", "dqn_tc", "popart"};
    add_run_options(cmd_sweep);
    cmd_sweep->add_option("--agents", sweep_agents, "agent kinds to sweep")->delimiter(',');

    CLI::App* cmd_verify = app.add_subcommand("verify", "run an oracle suite");
    std::string suite = "all";
    cmd_verify->add_option("suite", suite, "codec|prop1|gradients|popart|squash|all");

    CLI::App* cmd_plot = app.add_subcommand("plot", "render SVG charts from run CSVs");
    std::vector<std::string> plot_dirs;
    std::string plot_out = "plots";
    int window = 50;
    bool unexp = false;
    cmd_plot->add_option("dirs", plot_dirs, "run directories")->required();
    cmd_plot->add_option("--out", plot_out, "output directory");
    cmd_plot->add_option("--window", window, "episodes per smoothing window");
    cmd_plot->add_flag("--unexp", unexp, "plot unexponentiated returns");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_run || *cmd_sweep) {
            ExperimentConfig cfg =
                config_path.empty() ? preset_config(preset) : load_config_file(config_path);
            if (cmd_run->count("--preset") || cmd_sweep->count("--preset"))
                cfg = preset_config(preset);
            if (cmd_run->count("--agent") || *cmd_sweep) cfg.agent = agent;
            if (cmd_run->count("--env") || cmd_sweep->count("--env")) cfg.env = env_name;
            if (cmd_run->count("--frames") || cmd_sweep->count("--frames")) cfg.frames = frames;
            if (cmd_run->count("--seeds") || cmd_sweep->count("--seeds")) {
                cfg.seeds.clear();
                for (int s = 1; s <= num_seeds; ++s) cfg.seeds.push_back(s);
            }

            if (*cmd_run) {
                const fs::path dir = out_dir.empty()
                                         ? fs::path(output_root()) / (cfg.agent + "_" + cfg.env)
                                         : fs::path(out_dir);
                return run_seeds(cfg, dir, jobs);
            }
            for (const std::string& kind : sweep_agents) {
                ExperimentConfig sweep_cfg = cfg;
                sweep_cfg.agent = kind;
                const fs::path dir =
                    (out_dir.empty() ? fs::path(output_root()) : fs::path(out_dir)) /
                    (kind + "_" + sweep_cfg.env);
                if (int rc = run_seeds(sweep_cfg, dir, jobs)) return rc;
            }
            return 0;
        }

        if (*cmd_verify) {
            const std::vector<CheckResult> results = verify_suite(suite);
            for (const CheckResult& r : results)
                std::cout << (r.passed ? "PASS" : "FAIL") << "  " << r.name
                          << (r.detail.empty() ? "" : "  (" + r.detail + ")") << "\n";
            return all_passed(results) ? 0 : 1;
        }

        if (*cmd_plot) {
            const std::vector<RunRecord> records = load_records(plot_dirs);
            if (records.empty()) throw std::runtime_error("no run CSVs found in given dirs");
            fs::create_directories(plot_out);

            std::map<std::string, std::vector<RunRecord>> by_agent;
            for (const RunRecord& record : records) by_agent[record.agent].push_back(record);

            std::vector<std::pair<std::string, SummaryCurve>> curves;
            for (const auto& [name, group] : by_agent)
                curves.emplace_back(name, aggregate_runs(group, window, 1000, 0, unexp));
            const std::string env_label = records.front().env;
            write_return_curve_svg(curves, "Mean episodic return on " + env_label,
                                   (fs::path(plot_out) / "returns.svg").string());

            for (const auto& [name, group] : by_agent) {
                const RunRecord& first = group.front();
                if (first.td_errors.empty()) continue;
                int buckets = 0;
                for (const TdErrorRow& row : first.td_errors)
                    buckets = std::max(buckets, row.bucket + 1);
                write_td_error_svg(first.td_errors, buckets,
                                   "TD percentage error: " + name + " on " + env_label,
                                   (fs::path(plot_out) / ("td_errors_" + name + ".svg")).string());
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
