#pragma once

// Global validity: grid checkers for the pointwise sufficient conditions (the GSC0 family)
// and exact parameter deciders for Gini-mean Minkowski and Hoelder inequalities.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "meanineq/diagcalc.hpp"
#include "meanineq/errors.hpp"
#include "meanineq/interval.hpp"
#include "meanineq/means.hpp"
#include "meanineq/parallel.hpp"

namespace meanineq {

enum class GlobalClass { HoldsGlobal, FailsGlobal, Inconclusive };

inline const char* to_string(GlobalClass c)
{
    switch (c) {
    case GlobalClass::HoldsGlobal: return "holds-global";
    case GlobalClass::FailsGlobal: return "fails-global";
    case GlobalClass::Inconclusive: return "inconclusive";
    }
    return "?";
}

/// A grid point where a pointwise sufficient condition failed: lhs > rhs at (a, b).
/// For the two-set conditions a = u and b = y; for the Minkowski form a = t and b = z;
/// for the Hoelder form a is empty and b = z.
struct GlobalProbe {
    std::vector<double> a;
    std::vector<double> b;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct GlobalVerdict {
    GlobalClass cls = GlobalClass::Inconclusive;
    std::string evidence;
    std::optional<GlobalProbe> probe;
};

/// Relative slack when comparing the two sides of a pointwise condition.
inline constexpr double kPointwiseTolerance = 1e-10;

struct GridOptions {
    std::size_t z_points = 33;  // per z-axis
    std::size_t t_points = 9;   // per simplex axis
    double z_min = 1e-3;
    double z_max = 1e3;
};

namespace detail {

inline bool pointwise_fails(double lhs, double rhs)
{
    if (!std::isfinite(lhs) || !std::isfinite(rhs)) return true;
    return lhs > rhs + kPointwiseTolerance * std::max({1.0, std::abs(lhs), std::abs(rhs)});
}

inline std::vector<double> log_grid(double lo, double hi, std::size_t count)
{
    std::vector<double> g(count);
    if (count == 1) {
        g[0] = std::sqrt(lo * hi);
        return g;
    }
    for (std::size_t i = 0; i < count; ++i)
        g[i] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * double(i) / double(count - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

// Row-major enumeration of a product grid: index -> coordinates.
inline void grid_point(std::size_t index, const std::vector<std::vector<double>>& axes, std::vector<double>& out)
{
    out.resize(axes.size());
    for (std::size_t j = axes.size(); j-- > 0;) {
        out[j] = axes[j][index % axes[j].size()];
        index /= axes[j].size();
    }
}

inline std::size_t grid_size(const std::vector<std::vector<double>>& axes)
{
    std::size_t n = 1;
    for (const auto& a : axes) n *= a.size();
    return n;
}

// Points t in [0,1]^k with sum 1 and t_j in {0, 1/m, ..., 1}, m = points - 1, in lexicographic order.
inline std::vector<std::vector<double>> simplex_grid(std::size_t k, std::size_t points)
{
    const std::size_t m = std::max<std::size_t>(points, 2) - 1;
    std::vector<std::vector<double>> out;
    std::vector<std::size_t> c(k, 0);
    auto rec = [&](auto&& self, std::size_t j, std::size_t left) -> void {
        if (j + 1 == k) {
            c[j] = left;
            std::vector<double> t(k);
            for (std::size_t i = 0; i < k; ++i) t[i] = double(c[i]) / double(m);
            out.push_back(std::move(t));
            return;
        }
        for (std::size_t v = 0; v <= left; ++v) {
            c[j] = v;
            self(self, j + 1, left - v);
        }
    };
    rec(rec, 0, m);
    return out;
}

// Evaluates fails(index) over [0, count) in parallel and returns the smallest failing index.
template <class Fails>
std::optional<std::size_t> first_failure(std::size_t count, Fails&& fails)
{
    const std::size_t chunks = std::min<std::size_t>(count, 256);
    std::vector<std::size_t> found(chunks, std::numeric_limits<std::size_t>::max());
    parallel_for(chunks, [&](std::size_t c) {
        const std::size_t begin = count * c / chunks, end = count * (c + 1) / chunks;
        for (std::size_t i = begin; i < end; ++i)
            if (fails(i)) {
                found[c] = i;
                return;
            }
    });
    for (std::size_t f : found)
        if (f != std::numeric_limits<std::size_t>::max()) return f;
    return std::nullopt;
}

inline std::string fmt_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline std::string fmt_pair(const GiniParams& p) { return "(" + fmt_double(p.r) + "," + fmt_double(p.s) + ")"; }

} // namespace detail

/// Checks p0(Phi y)(f0(Phi y) - f0(Phi u)) / (p0(Phi u) f0'(Phi u)) <= sum_j d_jPhi(u) (same term for M_j)
/// at all pairs (u, y) of a grid on the box (grid points per axis, infinite ends capped at 1e3).
inline GlobalVerdict check_gsc0(const InequalityProblem& pb, std::size_t grid)
{
    if (grid < 2) throw domain_error("GSC0 grid needs at least 2 points per axis");
    GlobalVerdict v;
    if (!common_weights(pb)) {
        v.evidence = "weights are not proportional; the pointwise condition does not apply";
        return v;
    }
    SamplingOptions opt;
    opt.cap = 1e3;
    std::vector<std::vector<double>> axes;
    for (const auto& iv : pb.box) axes.push_back(axis_samples(iv, grid, opt));
    const std::size_t points = detail::grid_size(axes);

    auto sides = [&](std::size_t index, std::vector<double>& u, std::vector<double>& y) {
        detail::grid_point(index / points, axes, u);
        detail::grid_point(index % points, axes, y);
        const double pu = pb.phi.value(u), py = pb.phi.value(y);
        const auto grad = pb.phi.gradient(u);
        double rhs = 0.0;
        for (std::size_t j = 0; j < pb.k; ++j) rhs += grad[j] * gsc0_term(pb.right[j], u[j], y[j]);
        return std::pair{gsc0_term(pb.left, pu, py), rhs};
    };
    const auto bad = detail::first_failure(points * points, [&](std::size_t i) {
        std::vector<double> u, y;
        auto [l, r] = sides(i, u, y);
        return detail::pointwise_fails(l, r);
    });
    char buf[128];
    std::snprintf(buf, sizeof buf, "pointwise condition at %zu (u,y) pairs, %zu points per axis", points * points, grid);
    if (!bad) {
        v.cls = GlobalClass::HoldsGlobal;
        v.evidence = std::string("grid-certified at resolution ") + std::to_string(grid) + ": " + buf;
        return v;
    }
    GlobalProbe p;
    auto [l, r] = sides(*bad, p.a, p.b);
    p.lhs = l;
    p.rhs = r;
    v.probe = p;
    v.evidence = std::string("pointwise condition fails (sufficient only): ") + buf;
    return v;
}

/// chi_{r0,s0}(sum t_j z_j) <= sum t_j chi_{rj,sj}(z_j) for z on a log grid of [z_min, z_max]^k
/// and t on a simplex grid.
inline GlobalVerdict check_gsc0_minkowski(const std::vector<GiniParams>& params, const GridOptions& opt = {})
{
    if (params.size() < 3) throw shape_error("need outer and at least two inner parameter pairs");
    const std::size_t k = params.size() - 1;
    const std::vector<std::vector<double>> axes(k, detail::log_grid(opt.z_min, opt.z_max, opt.z_points));
    const auto ts = detail::simplex_grid(k, opt.t_points);
    const std::size_t zs = detail::grid_size(axes);

    auto sides = [&](std::size_t index, std::vector<double>& t, std::vector<double>& z) {
        t = ts[index % ts.size()];
        detail::grid_point(index / ts.size(), axes, z);
        double mix = 0.0, rhs = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            mix += t[j] * z[j];
            if (t[j] > 0.0) rhs += t[j] * chi(params[j + 1], z[j]);
        }
        return std::pair{chi(params[0], mix), rhs};
    };
    const auto bad = detail::first_failure(zs * ts.size(), [&](std::size_t i) {
        std::vector<double> t, z;
        auto [l, r] = sides(i, t, z);
        return detail::pointwise_fails(l, r);
    });
    GlobalVerdict v;
    const std::string res = std::to_string(opt.z_points) + " z-points per axis on [" + detail::fmt_double(opt.z_min) +
                            ", " + detail::fmt_double(opt.z_max) + "], " + std::to_string(ts.size()) + " simplex points";
    if (!bad) {
        v.cls = GlobalClass::HoldsGlobal;
        v.evidence = "grid-certified at resolution " + res + ": chi-form Minkowski condition holds";
        return v;
    }
    GlobalProbe p;
    auto [l, r] = sides(*bad, p.a, p.b);
    p.lhs = l;
    p.rhs = r;
    v.probe = p;
    v.evidence = "chi-form Minkowski condition fails at a grid point (" + res + ")";
    return v;
}

/// Quotient set I/I = (lo/hi, hi/lo) of a positive interval.
inline Interval ratio_interval(const Interval& iv)
{
    if (!iv.on_positive_axis()) throw domain_error("ratio sets need positive intervals");
    const double lo = iv.hi == kInf ? 0.0 : iv.lo / iv.hi;
    const double hi = iv.lo == 0.0 ? kInf : iv.hi / iv.lo;
    return {lo, hi};
}

/// chi_{-r0,-s0}(z_1 ... z_k) <= sum chi_{rj,sj}(z_j) on a log grid of the ratio boxes
/// (capped to [z_min, z_max]). Parameters use the convention where the outer mean is G_{-r0,-s0}.
inline GlobalVerdict check_gsc0_hoelder(const std::vector<GiniParams>& params, const Box& ratio_boxes,
                                        const GridOptions& opt = {})
{
    if (params.size() < 3 || ratio_boxes.size() + 1 != params.size())
        throw shape_error("need k+1 parameter pairs and k ratio intervals");
    const std::size_t k = ratio_boxes.size();
    std::vector<std::vector<double>> axes;
    for (const auto& iv : ratio_boxes) {
        if (!iv.contains(1.0)) throw domain_error("a ratio interval must contain 1");
        const double lo = std::max(iv.lo, opt.z_min), hi = std::min(iv.hi, opt.z_max);
        auto g = detail::log_grid(lo, hi, opt.z_points);
        // open ends: step just inside
        for (double& z : g) z = std::clamp(z, std::nextafter(iv.lo, kInf), std::nextafter(iv.hi, 0.0));
        axes.push_back(g);
    }
    const GiniParams outer(-params[0].r, -params[0].s);
    auto sides = [&](std::size_t index, std::vector<double>& z) {
        detail::grid_point(index, axes, z);
        double prod = 1.0, rhs = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            prod *= z[j];
            rhs += chi(params[j + 1], z[j]);
        }
        return std::pair{chi(outer, prod), rhs};
    };
    const std::size_t count = detail::grid_size(axes);
    const auto bad = detail::first_failure(count, [&](std::size_t i) {
        std::vector<double> z;
        auto [l, r] = sides(i, z);
        return detail::pointwise_fails(l, r);
    });
    GlobalVerdict v;
    const std::string res = std::to_string(opt.z_points) + " z-points per axis";
    if (!bad) {
        v.cls = GlobalClass::HoldsGlobal;
        v.evidence = "grid-certified at resolution " + res + ": chi-form Hoelder condition holds";
        return v;
    }
    GlobalProbe p;
    auto [l, r] = sides(*bad, p.b);
    p.lhs = l;
    p.rhs = r;
    v.probe = p;
    v.evidence = "chi-form Hoelder condition fails at a grid point (" + res + ")";
    return v;
}

/// Two-variable Gini Minkowski inequality on the positive orthant (exact characterization).
inline GlobalVerdict decide_minkowski_2var(const std::vector<GiniParams>& params)
{
    if (params.size() < 3) throw shape_error("need outer and at least two inner parameter pairs");
    double inner_min = kInf, inner_sum_min = kInf;
    for (std::size_t j = 1; j < params.size(); ++j) {
        inner_min = std::min({inner_min, params[j].r, params[j].s});
        inner_sum_min = std::min(inner_sum_min, params[j].sum());
    }
    const auto& o = params[0];
    const bool c1 = 0.0 <= inner_min;
    const bool c2 = std::min(o.r, o.s) <= std::min(1.0, inner_min);
    const bool c3 = std::max(1.0, o.sum()) <= inner_sum_min;
    GlobalVerdict v;
    v.cls = c1 && c2 && c3 ? GlobalClass::HoldsGlobal : GlobalClass::FailsGlobal;
    v.evidence = std::string("two-variable characterization (n = 2): ") + "(i) 0 <= min inner parameter " +
                 (c1 ? "holds" : "fails") + "; (ii) min(r0,s0) <= min(1, inner parameters) " +
                 (c2 ? "holds" : "fails") + "; (iii) max(1, r0+s0) <= min(r_j+s_j) " + (c3 ? "holds" : "fails");
    return v;
}

/// Gini Minkowski inequality for all n simultaneously (exact characterization).
inline GlobalVerdict decide_minkowski_global(const std::vector<GiniParams>& params)
{
    if (params.size() < 3) throw shape_error("need outer and at least two inner parameter pairs");
    double inner_min = kInf, inner_maxes_min = kInf;
    for (std::size_t j = 1; j < params.size(); ++j) {
        inner_min = std::min({inner_min, params[j].r, params[j].s});
        inner_maxes_min = std::min(inner_maxes_min, std::max(params[j].r, params[j].s));
    }
    const auto& o = params[0];
    const bool c1 = 0.0 <= inner_min;
    const bool c2 = std::min(o.r, o.s) <= std::min(1.0, inner_min);
    const bool c3 = std::max({1.0, o.r, o.s}) <= inner_maxes_min;
    GlobalVerdict v;
    v.cls = c1 && c2 && c3 ? GlobalClass::HoldsGlobal : GlobalClass::FailsGlobal;
    v.evidence = std::string("all-n characterization: ") + "(i) 0 <= min inner parameter " +
                 (c1 ? "holds" : "fails") + "; (ii) min(r0,s0) <= min(1, inner parameters) " +
                 (c2 ? "holds" : "fails") + "; (iii) max(1,r0,s0) <= min max(r_j,s_j) " + (c3 ? "holds" : "fails") +
                 "; the characterization for a fixed n > 2 is not known";
    return v;
}

/// Hoelder-type inequality G_{-r0,-s0}(products) <= prod G_{rj,sj} for all n (exact characterization).
/// A reciprocal sum within 1e-12 max|1/c| of zero counts as zero.
inline GlobalVerdict decide_hoelder_global(const std::vector<GiniParams>& params)
{
    if (params.size() < 3) throw shape_error("need outer and at least two inner parameter pairs");
    const std::size_t m = params.size();
    GlobalVerdict v;
    v.cls = GlobalClass::HoldsGlobal;
    std::string why;
    for (std::size_t i = 0; i < m; ++i) {
        if (std::max(params[i].r, params[i].s) < 0.0) {
            v.cls = GlobalClass::FailsGlobal;
            why += "(i) fails: max(r,s) < 0 for pair " + std::to_string(i) + "; ";
        }
    }
    for (std::size_t i = 0; i < m && v.cls == GlobalClass::HoldsGlobal; ++i) {
        const double lo = std::min(params[i].r, params[i].s);
        if (lo >= 0.0) continue;
        double sum = 1.0 / lo, band = 1.0 / std::abs(lo);
        bool positive = true;
        for (std::size_t j = 0; j < m; ++j) {
            if (j == i) continue;
            const double hi = std::max(params[j].r, params[j].s);
            if (!(hi > 0.0)) {
                positive = false;
                break;
            }
            sum += 1.0 / hi;
            band = std::max(band, 1.0 / hi);
        }
        if (!positive) {
            v.cls = GlobalClass::FailsGlobal;
            why += "(ii) fails: pair " + std::to_string(i) + " has a negative minimum and another max(r,s) <= 0; ";
            break;
        }
        band *= 1e-12;
        if (std::abs(sum) <= band) sum = 0.0;
        why += "(ii) pair " + std::to_string(i) + ": reciprocal sum " + detail::fmt_double(sum);
        if (sum > 0.0) {
            v.cls = GlobalClass::FailsGlobal;
            why += " > 0; ";
        } else {
            why += " <= 0; ";
        }
    }
    if (why.empty()) why = "(i) holds and no pair has a negative minimum; ";
    why.resize(why.size() - 2);
    v.evidence = "all-n Hoelder characterization: " + why;
    return v;
}

} // namespace meanineq
