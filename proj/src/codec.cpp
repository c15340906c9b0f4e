#include "spectral_rl/codec.hpp"

#include <algorithm>
#include <cmath>

namespace spectral {

void CodecConfig::validate() const {
    if (!(base > 1.0))
        throw std::invalid_argument("CodecConfig: base must be > 1");
    if (max_frequency < 0)
        throw std::invalid_argument("CodecConfig: max_frequency must be >= 0");
}

double max_representable(const CodecConfig& cfg) {
    cfg.validate();
    return (std::pow(cfg.base, cfg.max_frequency + 1) - 1.0) / (cfg.base - 1.0);
}

void decompose_into(double r, const CodecConfig& cfg, std::span<double> out) {
    const double mag = std::abs(r);
    if (mag > max_representable(cfg))
        throw MagnitudeOverflow("reward magnitude " + std::to_string(mag) +
                                " exceeds max representable " +
                                std::to_string(max_representable(cfg)));
    const double sign = (r > 0.0) ? 1.0 : (r < 0.0 ? -1.0 : 0.0);
    double bucket_start = 0.0;  // (b^i - 1) / (b - 1), accumulated
    double width = 1.0;         // b^i
    for (int i = 0; i <= cfg.max_frequency; ++i) {
        const double fill = std::clamp((mag - bucket_start) / width, 0.0, 1.0);
        out[static_cast<size_t>(i)] = sign * fill;
        bucket_start += width;
        width *= cfg.base;
    }
}

SpectralVector decompose(double r, const CodecConfig& cfg) {
    SpectralVector v(static_cast<size_t>(cfg.num_components()));
    decompose_into(r, cfg, v);
    return v;
}

double reconstruct(std::span<const double> v, const CodecConfig& cfg) {
    double sum = 0.0;
    double width = 1.0;
    for (double c : v) {
        sum += width * c;
        width *= cfg.base;
    }
    return sum;
}

}  // namespace spectral
