#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "spectral_rl/experiment_config.hpp"
#include "spectral_rl/plot.hpp"

using namespace spectral;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("presets pin the headline hyperparameters") {
    const ExperimentConfig desk = preset_config("desk");
    CHECK(desk.core.width == 5);
    CHECK(desk.agent_cfg.adam.lr == 3e-4);
    CHECK(desk.agent_cfg.adam.stabilizer == 1e-8);
    CHECK(desk.agent_cfg.target_refresh == 500);
    CHECK(desk.agent_cfg.eps_decay_frames == 20000);
    CHECK(desk.agent_cfg.eps_final == 0.05);
    CHECK(desk.agent_cfg.sigma_min == 0.3);
    CHECK(desk.agent_cfg.codec.base == 2.0);
    CHECK(desk.agent_cfg.codec.max_frequency == 20);

    const ExperimentConfig paper = preset_config("paper");
    CHECK(paper.agent_cfg.adam.lr == 2.5e-5);
    CHECK(paper.agent_cfg.eps_final == 0.01);
    CHECK(paper.agent_cfg.n_step == 3);
    CHECK(paper.agent_cfg.gamma == doctest::Approx(std::pow(0.99, 1.0 / 3.0)).epsilon(1e-15));
    CHECK(paper.agent_cfg.adam.stabilizer == doctest::Approx(0.005 / 32).epsilon(1e-15));

    CHECK_THROWS_AS(preset_config("atari"), std::invalid_argument);
}

TEST_CASE("config serialization round trips") {
    ExperimentConfig cfg = preset_config("desk");
    cfg.agent = "popart";
    cfg.env = "two_phase_easier";
    cfg.frames = 12345;
    cfg.seeds = {7, 9};
    cfg.core.score_cap = 11;
    cfg.agent_cfg.hidden = {64, 32};
    cfg.agent_cfg.shared_argmax = true;
    cfg.telemetry.probe_period = 777;

    const ExperimentConfig parsed = parse_config(serialize_config(cfg));
    CHECK(parsed == cfg);
    CHECK(parsed.agent == "popart");
    CHECK(parsed.seeds == std::vector<std::uint64_t>{7, 9});
    CHECK(parsed.agent_cfg.hidden == std::vector<int>{64, 32});
    CHECK(parsed.telemetry.probe_period == 777);
}

TEST_CASE("partial configs fall back to preset defaults") {
    const ExperimentConfig cfg =
        parse_config(R"({"preset": "paper", "agent": "dqn_tc", "frames": 42})");
    CHECK(cfg.agent == "dqn_tc");
    CHECK(cfg.frames == 42);
    CHECK(cfg.agent_cfg.adam.lr == 2.5e-5);  // inherited from the paper preset
    CHECK(cfg.env == "exp_catch");
}

TEST_CASE("config files round trip through disk") {
    const std::string path =
        (std::filesystem::temp_directory_path() / "spectral_rl_cfg_test.json").string();
    ExperimentConfig cfg = preset_config("desk");
    cfg.agent = "spectral_flat_weights";
    save_config_file(cfg, path);
    CHECK(load_config_file(path) == cfg);
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_config_file("/nonexistent/cfg.json"), std::runtime_error);
}

TEST_CASE("config validation rejects unknown names") {
    ExperimentConfig cfg = preset_config("desk");
    cfg.agent = "rainbow";
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = preset_config("desk");
    cfg.env = "pong";
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = preset_config("desk");
    cfg.seeds.clear();
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    CHECK_NOTHROW(preset_config("desk").validate());
}

TEST_CASE("output root honors the environment override") {
    const char* saved = std::getenv("SPECTRAL_RL_OUT");
    const std::string saved_copy = saved ? saved : "";

    setenv("SPECTRAL_RL_OUT", "/tmp/spectral_out_test", 1);
    CHECK(output_root() == "/tmp/spectral_out_test");
    unsetenv("SPECTRAL_RL_OUT");
    CHECK(output_root() == "runs");

    if (saved) setenv("SPECTRAL_RL_OUT", saved_copy.c_str(), 1);
}

TEST_CASE("return-curve SVG contains axes, bands and legend entries") {
    SummaryCurve curve;
    for (int g = 1; g <= 20; ++g) {
        curve.frames.push_back(g * 100.0);
        curve.mean.push_back(2.254);
        curve.lower.push_back(2.0);
        curve.upper.push_back(2.5);
    }
    const std::string path =
        (std::filesystem::temp_directory_path() / "spectral_rl_returns_test.svg").string();
    write_return_curve_svg({{"spectral", curve}, {"popart", curve}}, "Returns test", path);

    const std::string svg = slurp(path);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("Returns test") != std::string::npos);
    CHECK(svg.find("spectral") != std::string::npos);
    CHECK(svg.find("popart") != std::string::npos);
    CHECK(svg.find("polygon") != std::string::npos);  // confidence band
    CHECK(svg.find("polyline") != std::string::npos);  // mean line
    std::remove(path.c_str());
}

TEST_CASE("td-error SVG draws one line per bucket and skips missing data") {
    std::vector<TdErrorRow> rows;
    for (long frame = 1000; frame <= 10000; frame += 1000) {
        rows.push_back({frame, 0, 0.10, true});
        rows.push_back({frame, 1, 0.05, true});
        rows.push_back({frame, 2, 0.0, false});  // never valid: no line
    }
    const std::string path =
        (std::filesystem::temp_directory_path() / "spectral_rl_td_test.svg").string();
    write_td_error_svg(rows, 3, "TD test", path);

    const std::string svg = slurp(path);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("TD test") != std::string::npos);
    // Bucket 0 renders in blue, the top bucket toward red.
    CHECK(svg.find("rgb(0,0,255)") != std::string::npos);
    std::remove(path.c_str());
}
