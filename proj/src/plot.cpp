#include "spectral_rl/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace spectral {

namespace {

constexpr int kWidth = 800;
constexpr int kHeight = 480;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 20;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 50;

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void include(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        if (!(hi > lo)) {
            lo -= 1.0;
            hi += 1.0;
        }
        const double span = hi - lo;
        lo -= 0.05 * span;
        hi += 0.05 * span;
    }
};

double map_x(double v, const Range& r) {
    return kMarginLeft + (v - r.lo) / (r.hi - r.lo) * (kWidth - kMarginLeft - kMarginRight);
}

double map_y(double v, const Range& r) {
    return kHeight - kMarginBottom -
           (v - r.lo) / (r.hi - r.lo) * (kHeight - kMarginTop - kMarginBottom);
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2"};

void write_frame(std::ostream& out, const std::string& title, const Range& xr, const Range& yr,
                 const std::string& xlabel, const std::string& ylabel) {
    out << "<rect x='0' y='0' width='" << kWidth << "' height='" << kHeight
        << "' fill='white'/>\n";
    out << "<text x='" << kWidth / 2 << "' y='24' text-anchor='middle' font-size='16' "
           "font-family='sans-serif'>"
        << title << "</text>\n";
    // axes
    out << "<line x1='" << kMarginLeft << "' y1='" << kHeight - kMarginBottom << "' x2='"
        << kWidth - kMarginRight << "' y2='" << kHeight - kMarginBottom
        << "' stroke='black'/>\n";
    out << "<line x1='" << kMarginLeft << "' y1='" << kMarginTop << "' x2='" << kMarginLeft
        << "' y2='" << kHeight - kMarginBottom << "' stroke='black'/>\n";
    for (int k = 0; k <= 5; ++k) {
        const double xv = xr.lo + (xr.hi - xr.lo) * k / 5;
        const double yv = yr.lo + (yr.hi - yr.lo) * k / 5;
        out << "<text x='" << map_x(xv, xr) << "' y='" << kHeight - kMarginBottom + 18
            << "' text-anchor='middle' font-size='11' font-family='sans-serif'>" << fmt(xv)
            << "</text>\n";
        out << "<text x='" << kMarginLeft - 8 << "' y='" << map_y(yv, yr) + 4
            << "' text-anchor='end' font-size='11' font-family='sans-serif'>" << fmt(yv)
            << "</text>\n";
    }
    out << "<text x='" << kWidth / 2 << "' y='" << kHeight - 10
        << "' text-anchor='middle' font-size='12' font-family='sans-serif'>" << xlabel
        << "</text>\n";
    out << "<text x='16' y='" << kHeight / 2
        << "' text-anchor='middle' font-size='12' font-family='sans-serif' transform='rotate(-90 "
           "16 "
        << kHeight / 2 << ")'>" << ylabel << "</text>\n";
}

}  // namespace

void write_return_curve_svg(const std::vector<std::pair<std::string, SummaryCurve>>& curves,
                            const std::string& title, const std::string& path) {
    if (curves.empty()) throw std::invalid_argument("write_return_curve_svg: no curves");
    Range xr, yr;
    for (const auto& [name, curve] : curves) {
        for (double f : curve.frames) xr.include(f);
        for (double v : curve.lower) yr.include(v);
        for (double v : curve.upper) yr.include(v);
    }
    if (!std::isfinite(xr.lo)) throw std::invalid_argument("write_return_curve_svg: empty curves");
    xr.pad();
    yr.pad();

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write SVG: " + path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth << "' height='" << kHeight
        << "'>\n";
    write_frame(out, title, xr, yr, "frame", "mean episodic return");

    for (size_t c = 0; c < curves.size(); ++c) {
        const SummaryCurve& curve = curves[c].second;
        const char* color = kPalette[c % std::size(kPalette)];
        // confidence band
        out << "<polygon fill='" << color << "' fill-opacity='0.15' stroke='none' points='";
        for (size_t k = 0; k < curve.frames.size(); ++k)
            out << map_x(curve.frames[k], xr) << "," << map_y(curve.upper[k], yr) << " ";
        for (size_t k = curve.frames.size(); k-- > 0;)
            out << map_x(curve.frames[k], xr) << "," << map_y(curve.lower[k], yr) << " ";
        out << "'/>\n";
        out << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
        for (size_t k = 0; k < curve.frames.size(); ++k)
            out << map_x(curve.frames[k], xr) << "," << map_y(curve.mean[k], yr) << " ";
        out << "'/>\n";
        out << "<text x='" << kWidth - kMarginRight - 8 << "' y='" << kMarginTop + 16 * (c + 1)
            << "' text-anchor='end' font-size='12' font-family='sans-serif' fill='" << color
            << "'>" << curves[c].first << "</text>\n";
    }
    out << "</svg>\n";
}

void write_td_error_svg(const std::vector<TdErrorRow>& rows, int num_buckets,
                        const std::string& title, const std::string& path) {
    if (rows.empty()) throw std::invalid_argument("write_td_error_svg: no rows");
    Range xr, yr;
    for (const TdErrorRow& row : rows) {
        if (!row.valid) continue;
        xr.include(static_cast<double>(row.frame));
        yr.include(row.value);
    }
    if (!std::isfinite(xr.lo))
        throw std::invalid_argument("write_td_error_svg: no valid data points");
    xr.pad();
    yr.pad();

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write SVG: " + path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth << "' height='" << kHeight
        << "'>\n";
    write_frame(out, title, xr, yr, "frame", "TD percentage error");

    for (int bucket = 0; bucket < num_buckets; ++bucket) {
        const double t = num_buckets > 1 ? static_cast<double>(bucket) / (num_buckets - 1) : 0.0;
        const int r = static_cast<int>(std::lround(255 * t));
        const int b = static_cast<int>(std::lround(255 * (1.0 - t)));
        std::ostringstream color;
        color << "rgb(" << r << ",0," << b << ")";
        out << "<polyline fill='none' stroke='" << color.str() << "' stroke-width='1' points='";
        for (const TdErrorRow& row : rows)
            if (row.valid && row.bucket == bucket)
                out << map_x(static_cast<double>(row.frame), xr) << "," << map_y(row.value, yr)
                    << " ";
        out << "'/>\n";
    }
    out << "</svg>\n";
}

}  // namespace spectral
