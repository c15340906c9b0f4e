#pragma once

#include <string>
#include <utility>
#include <vector>

#include "spectral_rl/harness.hpp"

namespace spectral {

// Mean-return curves (one per agent) with shaded confidence bands.
void write_return_curve_svg(const std::vector<std::pair<std::string, SummaryCurve>>& curves,
                            const std::string& title, const std::string& path);

// Per-bucket TD-percentage-error lines, blue (low score) through red (high
// score). One line per score bucket; missing data points are skipped.
void write_td_error_svg(const std::vector<TdErrorRow>& rows, int num_buckets,
                        const std::string& title, const std::string& path);

}  // namespace spectral
