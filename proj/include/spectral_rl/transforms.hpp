#pragma once

#include <span>

namespace spectral {

// Square-root squashing used by target compression. epsilon keeps the
// inverse Lipschitz continuous.
struct SquashConfig {
    double epsilon = 1e-2;
};

// h(x) = sign(x)(sqrt(|x| + 1) - 1) + eps * x. Odd, strictly increasing.
double squash(double x, const SquashConfig& cfg);

// Closed-form inverse of squash.
double unsquash(double y, const SquashConfig& cfg);

// Exponentially weighted mean / second-moment tracker. Backs the Pop-Art
// normalizer and the per-frequency target sigmas of the spectral loss.
struct RunningStats {
    double mean = 0.0;
    double second_moment = 1.0;
    double decay = 1e-3;       // EMA step per update() call
    double sigma_min = 1e-4;   // floor so 1/sigma^2 stays finite
    long updates = 0;

    double sigma() const;

    // One EMA step toward the batch moments. Empty input is a no-op.
    void update(std::span<const double> observations);
    void update(double observation) { update(std::span<const double>(&observation, 1)); }

    double normalize(double x) const { return (x - mean) / sigma(); }
    double denormalize(double z) const { return z * sigma() + mean; }
};

}  // namespace spectral
