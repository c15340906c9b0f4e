#include "spectral_rl/verify.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "spectral_rl/codec.hpp"
#include "spectral_rl/env.hpp"
#include "spectral_rl/net.hpp"
#include "spectral_rl/tabular.hpp"
#include "spectral_rl/transforms.hpp"

namespace spectral {

namespace {

CheckResult check(const std::string& name, bool passed, const std::string& detail) {
    return {name, passed, detail};
}

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(6);
    ss << v;
    return ss.str();
}

}  // namespace

std::vector<CheckResult> verify_codec() {
    std::vector<CheckResult> results;
    const CodecConfig cfg{2.0, 20};

    {
        // Worked decomposition of 6.5: (1, 1, 0.875, 0, ...), exact.
        const SpectralVector v = decompose(6.5, cfg);
        bool ok = v[0] == 1.0 && v[1] == 1.0 && v[2] == 0.875;
        for (size_t i = 3; i < v.size(); ++i) ok = ok && v[i] == 0.0;
        results.push_back(check("decompose(6.5) = (1, 1, 0.875, 0, ...)", ok,
                                "components " + fmt(v[0]) + ", " + fmt(v[1]) + ", " + fmt(v[2])));
    }
    {
        // Reward stream (1, 4, 11, -4, -10), gamma = 0.99: per-frequency
        // discounted sums match the worked return-decomposition table.
        const CodecConfig small{2.0, 3};
        const double rewards[] = {1, 4, 11, -4, -10};
        const double gamma = 0.99;
        double returns[4] = {0, 0, 0, 0};
        double gamma_pow = 1.0;
        for (double r : rewards) {
            const SpectralVector v = decompose(r, small);
            for (int i = 0; i < 4; ++i) returns[i] += gamma_pow * v[static_cast<size_t>(i)];
            gamma_pow *= gamma;
        }
        const double expected[4] = {1.039, 0.039, 0.024, 0.130};
        bool ok = true;
        for (int i = 0; i < 4; ++i)
            ok = ok && std::abs(returns[i] - expected[i]) < 5e-4;
        double weighted = 0.0;
        for (int i = 0; i < 4; ++i) weighted += std::pow(2.0, i) * returns[i];
        ok = ok && std::abs(weighted - 2.254) <= 1e-3;
        results.push_back(check("spectral returns of (1,4,11,-4,-10) and weighted sum 2.254", ok,
                                "returns " + fmt(returns[0]) + ", " + fmt(returns[1]) + ", " +
                                    fmt(returns[2]) + ", " + fmt(returns[3]) + "; sum " +
                                    fmt(weighted)));
    }
    {
        // Round trip over 1e5 random draws in [-1e6, 1e6].
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> draw(-1e6, 1e6);
        double worst = 0.0;
        std::vector<double> buf(static_cast<size_t>(cfg.num_components()));
        for (int k = 0; k < 100000; ++k) {
            const double r = draw(rng);
            decompose_into(r, cfg, buf);
            const double err = std::abs(reconstruct(buf, cfg) - r) / std::max(1.0, std::abs(r));
            worst = std::max(worst, err);
        }
        results.push_back(check("round trip within 1e-9 relative over 1e5 draws", worst <= 1e-9,
                                "worst relative error " + fmt(worst)));
    }
    return results;
}

std::vector<CheckResult> verify_squash() {
    std::vector<CheckResult> results;
    const SquashConfig cfg{1e-2};
    {
        const double y = squash(3.0, cfg);
        results.push_back(check("squash(3) = 1.03", std::abs(y - 1.03) < 1e-12, fmt(y)));
    }
    {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> draw(-1e6, 1e6);
        double worst = 0.0;
        for (int k = 0; k < 100000; ++k) {
            const double y = draw(rng);
            const double err =
                std::abs(squash(unsquash(y, cfg), cfg) - y) / std::max(1.0, std::abs(y));
            worst = std::max(worst, err);
        }
        results.push_back(check("squash(unsquash(y)) = y within 1e-9 over 1e5 draws",
                                worst <= 1e-9, "worst relative error " + fmt(worst)));
    }
    {
        std::mt19937_64 rng(13);
        std::uniform_real_distribution<double> draw(-1e6, 1e6);
        double worst = 0.0;
        for (int k = 0; k < 100000; ++k) {
            const double x = draw(rng);
            const double err =
                std::abs(unsquash(squash(x, cfg), cfg) - x) / std::max(1.0, std::abs(x));
            worst = std::max(worst, err);
        }
        results.push_back(check("unsquash(squash(x)) = x within 1e-9 over 1e5 draws",
                                worst <= 1e-9, "worst relative error " + fmt(worst)));
    }
    return results;
}

std::vector<CheckResult> verify_prop1() {
    std::vector<CheckResult> results;
    const CodecConfig codec{2.0, 3};  // captures magnitudes up to 15
    double worst = 0.0;
    bool actions_ok = true;
    std::mt19937_64 seed_rng(101);
    for (int m = 0; m < 20; ++m) {
        std::uniform_int_distribution<int> states(2, 10), actions(2, 4);
        const int S = states(seed_rng), A = actions(seed_rng);
        const TabularMDP mdp = generate_tabular_mdp(S, A, 15.0, seed_rng());
        const EquivalenceReport report = check_equivalence(mdp, 10000, seed_rng(), codec);
        worst = std::max(worst, report.max_abs_deviation);
        actions_ok = actions_ok && report.identical_actions && !report.overflow;
    }
    results.push_back(check("aggregate spectral Q matches standard Q within 1e-8 on 20 MDPs",
                            worst <= 1e-8, "worst deviation " + fmt(worst)));
    results.push_back(check("identical action sequences across all 20 MDPs", actions_ok, ""));
    return results;
}

std::vector<CheckResult> verify_gradients() {
    std::vector<CheckResult> results;
    double worst = 0.0;
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    for (int trial = 0; trial < 100; ++trial) {
        MlpConfig cfg;
        cfg.input_dim = 2;
        cfg.hidden = {8};
        cfg.heads = 3;
        cfg.actions = 2;
        cfg.seed = rng();
        Mlp net(cfg);

        std::vector<double> input(2), target(static_cast<size_t>(net.output_dim())),
            weights(static_cast<size_t>(net.output_dim()));
        for (double& v : input) v = unit(rng);
        for (double& v : target) v = unit(rng);
        for (double& v : weights) v = 0.5 + std::abs(unit(rng));

        auto loss = [&](const Mlp& m) {
            std::vector<double> out(static_cast<size_t>(m.output_dim()));
            m.forward(input, out);
            double l = 0.0;
            for (size_t j = 0; j < out.size(); ++j) {
                const double e = out[j] - target[j];
                l += 0.5 * weights[j] * e * e;
            }
            return l;
        };

        Mlp::Cache cache;
        net.forward(input, cache);
        std::vector<double> delta(static_cast<size_t>(net.output_dim()));
        for (size_t j = 0; j < delta.size(); ++j)
            delta[j] = weights[j] * (cache.post.back()[j] - target[j]);
        std::vector<double> grads(net.num_params(), 0.0);
        net.backward(cache, delta, {}, grads);

        const double h = 1e-5;
        for (size_t p = 0; p < net.num_params(); ++p) {
            const double saved = net.params()[p];
            net.params()[p] = saved + h;
            const double up = loss(net);
            net.params()[p] = saved - h;
            const double down = loss(net);
            net.params()[p] = saved;
            const double numeric = (up - down) / (2.0 * h);
            const double scale = std::max({1e-6, std::abs(numeric), std::abs(grads[p])});
            worst = std::max(worst, std::abs(numeric - grads[p]) / scale);
        }
    }
    results.push_back(check("backprop matches central differences within 1e-4 (100 nets)",
                            worst <= 1e-4, "worst relative error " + fmt(worst)));
    return results;
}

std::vector<CheckResult> verify_popart() {
    std::vector<CheckResult> results;
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    double worst = 0.0;

    for (int trial = 0; trial < 20; ++trial) {
        MlpConfig cfg;
        cfg.input_dim = 4;
        cfg.hidden = {16};
        cfg.heads = 1;
        cfg.actions = 3;
        cfg.seed = rng();
        Mlp net(cfg);

        RunningStats stats;
        stats.decay = 0.3;
        std::vector<std::array<double, 4>> inputs(100);
        for (auto& x : inputs)
            for (double& v : x) v = unit(rng);

        std::vector<std::vector<double>> before;
        for (const auto& x : inputs) {
            std::vector<double> out(static_cast<size_t>(net.output_dim()));
            net.forward(std::span<const double>(x.data(), 4), out);
            for (double& v : out) v = stats.denormalize(v);
            before.push_back(std::move(out));
        }

        // Arbitrary stats movements, rescaling the layer after each.
        for (int u = 0; u < 5; ++u) {
            const double old_mean = stats.mean, old_sigma = stats.sigma();
            std::vector<double> batch(32);
            for (double& v : batch) v = 50.0 * unit(rng) * (u + 1);
            stats.update(batch);
            rescale_final_layer(net, old_mean, old_sigma, stats.mean, stats.sigma());
        }

        for (size_t k = 0; k < inputs.size(); ++k) {
            std::vector<double> out(static_cast<size_t>(net.output_dim()));
            net.forward(std::span<const double>(inputs[k].data(), 4), out);
            for (size_t j = 0; j < out.size(); ++j) {
                const double after = stats.denormalize(out[j]);
                worst = std::max(worst, std::abs(after - before[k][j]) /
                                            std::max(1.0, std::abs(before[k][j])));
            }
        }
    }
    results.push_back(check("denormalized outputs preserved within 1e-9 across rescales",
                            worst <= 1e-9, "worst relative change " + fmt(worst)));
    return results;
}

std::vector<CheckResult> verify_suite(const std::string& name) {
    if (name == "codec") return verify_codec();
    if (name == "squash") return verify_squash();
    if (name == "prop1") return verify_prop1();
    if (name == "gradients") return verify_gradients();
    if (name == "popart") return verify_popart();
    if (name == "all") {
        std::vector<CheckResult> all;
        for (const char* suite : {"codec", "squash", "prop1", "gradients", "popart"}) {
            auto results = verify_suite(suite);
            all.insert(all.end(), results.begin(), results.end());
        }
        return all;
    }
    throw std::invalid_argument("unknown verify suite: " + name);
}

bool all_passed(const std::vector<CheckResult>& results) {
    for (const CheckResult& r : results)
        if (!r.passed) return false;
    return true;
}

}  // namespace spectral
