#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "meanineq/errors.hpp"

namespace meanineq {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Open real interval ]lo, hi[ with extended-real endpoints.
struct Interval {
    double lo = -kInf;
    double hi = kInf;

    Interval() = default;
    Interval(double lo_, double hi_) : lo(lo_), hi(hi_)
    {
        if (std::isnan(lo) || std::isnan(hi) || !(lo < hi))
            throw domain_error("interval requires lo < hi");
        if (lo == kInf || hi == -kInf)
            throw domain_error("interval endpoints out of order");
    }

    static Interval positive() { return {0.0, kInf}; }
    static Interval real_line() { return {-kInf, kInf}; }

    bool contains(double t) const { return t > lo && t < hi; }
    bool contains(const Interval& other) const { return lo <= other.lo && other.hi <= hi; }
    bool bounded() const { return std::isfinite(lo) && std::isfinite(hi); }
    bool on_positive_axis() const { return lo >= 0.0; }

    friend bool operator==(const Interval&, const Interval&) = default;
};

using Box = std::vector<Interval>;

inline bool box_contains(const Box& box, const std::vector<double>& y)
{
    if (box.size() != y.size()) return false;
    for (std::size_t j = 0; j < y.size(); ++j)
        if (!box[j].contains(y[j])) return false;
    return true;
}

inline std::string format_endpoint(double v)
{
    if (v == kInf) return "inf";
    if (v == -kInf) return "-inf";
    char buf[64];
    for (int digits = 1; digits <= 17; ++digits) {
        std::snprintf(buf, sizeof buf, "%.*g", digits, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

/// Options for turning an open interval into a finite list of interior sample points.
struct SamplingOptions {
    double clip_fraction = 0.01;  // trimmed off each end (in the spacing's coordinate)
    double cap = 1e6;             // replaces infinite ends; 1/cap replaces a zero lower end
    bool geometric = true;        // log spacing on positive axes
    bool edge_probes = false;     // add points 1e-9 (relative) inside each finite end
};

/// Effective finite sampling range of an interval: infinite ends capped,
/// a zero lower end on the positive axis replaced by hi/cap^2 (or 1/cap).
inline std::pair<double, double> effective_range(const Interval& iv, double cap)
{
    double hi = std::isfinite(iv.hi) ? iv.hi : std::max(cap, std::abs(iv.lo) * 10.0);
    double lo;
    if (iv.on_positive_axis()) {
        lo = iv.lo > 0.0 ? iv.lo : std::min(1.0 / cap, hi / cap);
    } else {
        lo = std::isfinite(iv.lo) ? iv.lo : std::min(-cap, -std::abs(iv.hi) * 10.0);
    }
    return {lo, hi};
}

/// Interior sample points of an open interval, sorted ascending.
inline std::vector<double> axis_samples(const Interval& iv, std::size_t count, const SamplingOptions& opt = {})
{
    if (count == 0) return {};
    auto [lo, hi] = effective_range(iv, opt.cap);
    const bool logspace = opt.geometric && lo > 0.0;
    double a = logspace ? std::log(lo) : lo;
    double b = logspace ? std::log(hi) : hi;
    const double width = b - a;
    a += opt.clip_fraction * width;
    b -= opt.clip_fraction * width;

    std::vector<double> pts;
    pts.reserve(count + 2);
    auto emit = [&](double c) { pts.push_back(logspace ? std::exp(c) : c); };

    if (opt.edge_probes) {
        if (iv.lo == 0.0 && iv.on_positive_axis())
            pts.push_back(lo);
        else if (std::isfinite(iv.lo))
            pts.push_back(iv.lo + 1e-9 * (hi - iv.lo));
        else
            pts.push_back(lo);
    }
    if (count == 1) {
        emit(0.5 * (a + b));
    } else {
        for (std::size_t i = 0; i < count; ++i)
            emit(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
    }
    if (opt.edge_probes) {
        if (std::isfinite(iv.hi))
            pts.push_back(iv.hi - 1e-9 * (iv.hi - lo));
        else
            pts.push_back(hi);
    }
    // keep strictly interior
    std::vector<double> out;
    out.reserve(pts.size());
    for (double p : pts)
        if (iv.contains(p)) out.push_back(p);
    return out;
}

} // namespace meanineq
