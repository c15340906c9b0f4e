#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace spectral {

// Thrown when a reward's magnitude exceeds what the configured spectrum can
// represent. Usually means N was chosen too small for the task at hand.
struct MagnitudeOverflow : std::runtime_error {
    explicit MagnitudeOverflow(const std::string& what) : std::runtime_error(what) {}
};

// Base b and maximum frequency N of the spectral decomposition.
// The first N+1 frequencies capture all magnitudes up to (b^(N+1) - 1) / (b - 1).
struct CodecConfig {
    double base = 2.0;
    int max_frequency = 20;

    int num_components() const { return max_frequency + 1; }
    void validate() const;
};

// A vector of per-frequency components, each in [-1, 1], all sharing one sign.
using SpectralVector = std::vector<double>;

double max_representable(const CodecConfig& cfg);

// Bucket-fill decomposition of a scalar: component i is
// sign(r) * clamp((|r| - (b^i - 1)/(b - 1)) / b^i, 0, 1).
// Throws MagnitudeOverflow if |r| > max_representable(cfg).
SpectralVector decompose(double r, const CodecConfig& cfg);

// Same, writing into a caller-provided buffer of length N+1 (hot path).
void decompose_into(double r, const CodecConfig& cfg, std::span<double> out);

// Weighted sum: sum_i b^i * v[i]. Inverse of decompose for in-range scalars.
double reconstruct(std::span<const double> v, const CodecConfig& cfg);

}  // namespace spectral
