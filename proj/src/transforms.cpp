#include "spectral_rl/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spectral {

double squash(double x, const SquashConfig& cfg) {
    const double sign = (x > 0.0) ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
    return sign * (std::sqrt(std::abs(x) + 1.0) - 1.0) + cfg.epsilon * x;
}

double unsquash(double y, const SquashConfig& cfg) {
    const double eps = cfg.epsilon;
    if (!(eps > 0.0))
        throw std::invalid_argument("SquashConfig: epsilon must be > 0");
    const double sign = (y > 0.0) ? 1.0 : (y < 0.0 ? -1.0 : 0.0);
    const double a = std::abs(y);
    const double root = (std::sqrt(1.0 + 4.0 * eps * (a + 1.0 + eps)) - 1.0) / (2.0 * eps);
    return sign * (root * root - 1.0);
}

double RunningStats::sigma() const {
    const double var = std::max(second_moment - mean * mean, sigma_min * sigma_min);
    return std::sqrt(var);
}

void RunningStats::update(std::span<const double> observations) {
    if (observations.empty() || decay == 0.0)
        return;
    double m1 = 0.0, m2 = 0.0;
    for (double x : observations) {
        m1 += x;
        m2 += x * x;
    }
    const double n = static_cast<double>(observations.size());
    m1 /= n;
    m2 /= n;
    mean = (1.0 - decay) * mean + decay * m1;
    second_moment = (1.0 - decay) * second_moment + decay * m2;
    ++updates;
}

}  // namespace spectral
