#pragma once

// Local validity near the diagonal: the k x k matrix Gamma(y), grid scans of its
// definiteness, the closed-form Minkowski/Hoelder conditions for Gini means, and the
// Hessian of the convexified map Psi = phi_0 o Phi o (phi_1^-1, ..., phi_k^-1).

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
#include "meanineq/matrix.hpp"
#include "meanineq/parallel.hpp"
#include "meanineq/psd.hpp"

namespace meanineq {

/// Relative eigenvalue tolerance used when scanning Gamma over a grid.
inline constexpr double kScanTolerance = 1e-9;

enum class LocalClass { SufficientHolds, NecessaryFails, Boundary };

inline const char* to_string(LocalClass c)
{
    switch (c) {
    case LocalClass::SufficientHolds: return "sufficient-holds";
    case LocalClass::NecessaryFails: return "necessary-fails";
    case LocalClass::Boundary: return "boundary";
    }
    return "?";
}

struct LocalWitness {
    std::vector<double> y;
    Matrix gamma;
    std::vector<double> direction;  // eigenvector of the smallest eigenvalue of gamma
    double lambda_min = 0.0;
};

struct LocalVerdict {
    LocalClass cls = LocalClass::Boundary;
    std::optional<LocalWitness> witness;
    std::string summary;
    // set by local_scan when a closed-form decider applies to the problem
    std::optional<LocalClass> closed_form;
    std::optional<bool> closed_form_agrees;
};

/// Two verdicts contradict when one certifies sufficiency and the other refutes necessity.
inline bool contradicts(LocalClass a, LocalClass b)
{
    return (a == LocalClass::SufficientHolds && b == LocalClass::NecessaryFails) ||
           (a == LocalClass::NecessaryFails && b == LocalClass::SufficientHolds);
}

/// A problem whose means all have second-order data and proportional weights with a common lambda.
class GammaSpec {
public:
    explicit GammaSpec(InequalityProblem pb) : problem_(std::move(pb))
    {
        auto w = common_weights(problem_);
        if (!w) throw domain_error("weights are not proportional with a common lambda");
        lambda_ = *w;
        auto second = [](const MeanSpec& m) {
            if (as_gini(m)) return true;
            return std::get<BajraktarevicSpec>(m).has_second_order();
        };
        if (!second(problem_.left) || !std::all_of(problem_.right.begin(), problem_.right.end(), second))
            throw capability_error("Gamma needs second derivatives of every generator and weight");
    }

    const InequalityProblem& problem() const { return problem_; }
    const Weights& lambda() const { return lambda_; }

private:
    InequalityProblem problem_;
    Weights lambda_;
};

/// Gamma(y) together with a bound on its rounding error (entrywise).
struct GammaValue {
    Matrix gamma;
    Matrix error;
};

/// Gamma_ij(y) = -d_i d_j Phi - d_i Phi d_j Phi b_0(Phi(y)) + delta_ij d_j Phi b_j(y_j),
/// with b = 2 p_0'/p_0 + f''/f'.
inline GammaValue gamma_with_error(const GammaSpec& spec, std::span<const double> y)
{
    const auto& pb = spec.problem();
    if (!box_contains(pb.box, {y.begin(), y.end()})) throw domain_error("Gamma point outside the box");
    const std::size_t k = pb.k;
    const auto grad = pb.phi.gradient(y);
    const auto hess = pb.phi.hessian(y);
    const double b0 = curvature_term(pb.left, pb.phi.value(y));
    GammaValue out{Matrix(k, k), Matrix(k, k)};
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            const double a = -0.5 * (hess(i, j) + hess(j, i));
            const double b = grad[i] * grad[j] * b0;
            out.gamma(i, j) = a - b;
            out.error(i, j) = std::abs(a) + std::abs(b);
        }
    }
    for (std::size_t j = 0; j < k; ++j) {
        const double c = grad[j] * curvature_term(pb.right[j], y[j]);
        out.gamma(j, j) += c;
        out.error(j, j) += std::abs(c);
    }
    out.error *= 16.0 * std::numeric_limits<double>::epsilon();
    return out;
}

inline Matrix gamma_at(const GammaSpec& spec, std::span<const double> y) { return gamma_with_error(spec, y).gamma; }

namespace detail {

struct AxisPoint {
    double value;
    int tier;  // 0 regular grid, 1 near the ends, 2 extreme edge probes
};

inline std::vector<AxisPoint> scan_axis(const Interval& iv, std::size_t grid, bool deep)
{
    std::vector<AxisPoint> out;
    for (double v : axis_samples(iv, grid)) out.push_back({v, 0});
    if (deep) {
        for (double clip : {1e-3, 1e-6}) {
            SamplingOptions opt;
            opt.clip_fraction = clip;
            const auto s = axis_samples(iv, 2, opt);
            for (double v : s) out.push_back({v, 1});
        }
    }
    SamplingOptions opt;
    opt.edge_probes = true;
    const auto e = axis_samples(iv, 1, opt);
    if (e.size() == 3) {
        out.push_back({e.front(), 2});
        out.push_back({e.back(), 2});
    }
    std::sort(out.begin(), out.end(), [](const AxisPoint& a, const AxisPoint& b) { return a.value < b.value; });
    return out;
}

struct ScanPoint {
    std::vector<double> y;
    int tier = 0;
};

inline std::vector<ScanPoint> scan_points(const Box& box, std::size_t grid, bool deep)
{
    std::vector<std::vector<AxisPoint>> axes;
    for (const auto& iv : box) axes.push_back(scan_axis(iv, grid, deep));
    std::vector<ScanPoint> pts;
    std::vector<std::size_t> idx(box.size(), 0);
    while (true) {
        ScanPoint p;
        for (std::size_t j = 0; j < box.size(); ++j) {
            p.y.push_back(axes[j][idx[j]].value);
            p.tier = std::max(p.tier, axes[j][idx[j]].tier);
        }
        pts.push_back(std::move(p));
        std::size_t j = 0;
        while (j < box.size() && ++idx[j] == axes[j].size()) idx[j++] = 0;
        if (j == box.size()) break;
    }
    return pts;
}

struct PointResult {
    PsdClass cls = PsdClass::PositiveDefinite;
    double score = 0.0;  // lambda_min / max(1, spectral radius)
};

// Classified after the congruence D Gamma D, D = diag(|Gamma_ii|^-1/2), which keeps the inertia
// but removes the scale spread between axes. The band is the larger of the relative scan
// tolerance and the propagated rounding error of the entries (cancellation in b_j - b_0).
inline PointResult classify_gamma(const GammaValue& gv)
{
    const Matrix& g = gv.gamma;
    const std::size_t k = g.rows();
    std::vector<double> d(k, 1.0);
    for (std::size_t i = 0; i < k; ++i)
        if (g(i, i) != 0.0) d[i] = 1.0 / std::sqrt(std::abs(g(i, i)));
    Matrix scaled(k, k);
    double noise = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            scaled(i, j) = d[i] * g(i, j) * d[j];
            const double e = d[i] * gv.error(i, j) * d[j];
            noise += e * e;
        }
    }
    const auto eig = jacobi_eigen(scaled);
    const double lmin = eig.values.front();
    const double scale = std::max({1.0, std::abs(lmin), std::abs(eig.values.back())});
    const double band = std::max(kScanTolerance, std::sqrt(noise) / scale);
    PointResult r;
    r.score = lmin / scale;
    if (r.score > band)
        r.cls = PsdClass::PositiveDefinite;
    else if (r.score >= -band)
        r.cls = PsdClass::PositiveSemidefiniteOnly;
    else
        r.cls = PsdClass::Indefinite;
    return r;
}

inline LocalWitness make_witness(std::vector<double> y, Matrix g)
{
    const auto eig = jacobi_eigen(g);
    LocalWitness w;
    w.y = std::move(y);
    w.lambda_min = eig.values.front();
    w.direction = eig.vectors.column(0);
    w.gamma = std::move(g);
    return w;
}

// Picks the witness among scanned points: indefinite first (lowest tier, then most negative
// score, then lowest index), otherwise the first PSD-only point.
template <class GammaFn>
std::optional<LocalWitness> scan_for_witness(const std::vector<ScanPoint>& pts, GammaFn&& gamma, PsdClass& worst)
{
    std::vector<PointResult> res(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) { res[i] = classify_gamma(gamma(pts[i].y)); });
    auto witness_at = [&](std::size_t i) { return make_witness(pts[i].y, gamma(pts[i].y).gamma); };
    std::optional<std::size_t> bad, flat;
    worst = PsdClass::PositiveDefinite;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (res[i].cls == PsdClass::Indefinite) {
            worst = PsdClass::Indefinite;
            if (!bad || pts[i].tier < pts[*bad].tier ||
                (pts[i].tier == pts[*bad].tier && res[i].score < res[*bad].score))
                bad = i;
        } else if (res[i].cls == PsdClass::PositiveSemidefiniteOnly) {
            if (worst == PsdClass::PositiveDefinite) worst = PsdClass::PositiveSemidefiniteOnly;
            if (!flat) flat = i;
        }
    }
    if (bad) return witness_at(*bad);
    if (flat) return witness_at(*flat);
    return std::nullopt;
}

inline std::string fmt_gammas(const std::vector<double>& g)
{
    std::string s = "(";
    char buf[32];
    for (std::size_t i = 0; i < g.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%s%.6g", i ? ", " : "", g[i]);
        s += buf;
    }
    return s + ")";
}

// Gamma of a Gini+Sum problem: delta_ij gamma_i / y_i - gamma_0 / sum y.
inline GammaValue minkowski_gamma(const std::vector<double>& gammas, std::span<const double> y)
{
    const std::size_t k = y.size();
    double total = 0.0;
    for (double v : y) total += v;
    const double shift = gammas[0] / total;
    GammaValue out{Matrix(k, k, -shift), Matrix(k, k, std::abs(shift))};
    for (std::size_t i = 0; i < k; ++i) {
        out.gamma(i, i) += gammas[i + 1] / y[i];
        out.error(i, i) += std::abs(gammas[i + 1] / y[i]);
    }
    out.error *= 16.0 * std::numeric_limits<double>::epsilon();
    return out;
}

} // namespace detail

/// Gini exponent sums of a problem: gamma_i = r_i + s_i + shift (outer index 0).
inline std::vector<double> gini_gammas(const InequalityProblem& pb, double shift)
{
    std::vector<double> g;
    g.push_back(as_gini(pb.left)->params.sum() + shift);
    for (const auto& m : pb.right) g.push_back(as_gini(m)->params.sum() + shift);
    return g;
}

/// Closed-form local decision for Gini means under Phi = Sum, with gamma_i = r_i + s_i - 1.
inline LocalVerdict decide_minkowski_local(const std::vector<double>& gammas, const Box& box)
{
    if (gammas.size() < 3 || gammas.size() != box.size() + 1)
        throw shape_error("need gamma_0..gamma_k for a k-dimensional box, k >= 2");
    for (const auto& iv : box)
        if (!iv.on_positive_axis()) throw domain_error("Minkowski conditions need intervals in (0, inf)");

    const std::size_t k = box.size();
    const double g0 = gammas[0];
    std::size_t zeros = 0, inner_neg = 0, inner_pos = 0;
    for (std::size_t i = 0; i <= k; ++i) zeros += gammas[i] == 0.0;
    for (std::size_t i = 1; i <= k; ++i) {
        inner_neg += gammas[i] < 0.0;
        inner_pos += gammas[i] > 0.0;
    }

    // sum_{J+} (1/g_i - 1/g_0) sup I_i <= sum_{J-} (1/g_0 - 1/g_i) inf I_i, with inf*pos = inf, 0*pos = 0
    auto interval_condition = [&](double& lhs, double& rhs) {
        lhs = 0.0;
        rhs = 0.0;
        for (std::size_t i = 1; i <= k; ++i) {
            const double a = 1.0 / gammas[i], b = 1.0 / g0;
            if (a > b) lhs += (a - b) * box[i - 1].hi;
            if (b > a) rhs += (b - a) * box[i - 1].lo;
        }
        return lhs <= rhs;
    };
    bool some_differs = false;
    for (std::size_t i = 1; i <= k; ++i) some_differs |= gammas[i] != g0;

    LocalVerdict v;
    const std::string tag = "gamma = " + detail::fmt_gammas(gammas);
    bool necessary = false, sufficient = false;
    if (g0 <= 0.0 && inner_neg == 0) {
        necessary = true;
        sufficient = zeros <= 1;
        v.summary = tag + ": gamma_0 <= 0 <= min inner gamma" +
                    (sufficient ? " with at most one zero" : std::string(", several zeros"));
    } else {
        const bool all_pos = g0 > 0.0 && inner_pos == k;
        const bool one_neg = g0 < 0.0 && inner_neg == 1 && inner_pos == k - 1;
        if (all_pos || one_neg) {
            double lhs, rhs;
            necessary = interval_condition(lhs, rhs);
            sufficient = necessary && some_differs;
            char buf[160];
            std::snprintf(buf, sizeof buf, "%s, interval condition %.6g <= %.6g %s", all_pos ? "all gamma > 0" :
                          "gamma_0 < 0 with one negative inner gamma", lhs, rhs, necessary ? "holds" : "fails");
            v.summary = tag + ": " + buf;
            if (necessary && !sufficient) v.summary += ", all gamma equal";
        } else {
            v.summary = tag + ": sign pattern admits no positive semidefinite Gamma";
        }
    }
    v.cls = !necessary ? LocalClass::NecessaryFails : sufficient ? LocalClass::SufficientHolds : LocalClass::Boundary;

    if (v.cls != LocalClass::SufficientHolds) {
        PsdClass worst;
        const auto pts = detail::scan_points(box, 9, v.cls == LocalClass::NecessaryFails);
        v.witness = detail::scan_for_witness(
            pts, [&](std::span<const double> y) { return detail::minkowski_gamma(gammas, y); }, worst);
        if (!v.witness) {
            // the violation or degeneracy sits beyond the sampled points; report the most extreme probe
            v.witness = detail::make_witness(pts.back().y, detail::minkowski_gamma(gammas, pts.back().y).gamma);
            v.summary += " (no sampled point resolves it numerically)";
        }
    }
    return v;
}

/// Closed-form local decision for Gini means under Phi = Product. The outer mean is written
/// G_{-r_0,-s_0} and gamma_i = r_i + s_i; Gamma(y) is a positive multiple of a congruent
/// copy of (delta_ij gamma_j + gamma_0), so the verdict does not depend on y.
inline LocalVerdict decide_hoelder_local(const std::vector<double>& gammas)
{
    if (gammas.size() < 3) throw shape_error("need gamma_0..gamma_k with k >= 2");
    ShiftedDiagonal c(gammas[0], {gammas.begin() + 1, gammas.end()});
    const auto res = classify_shifted_diagonal(c);
    LocalVerdict v;
    v.summary = "gamma = " + detail::fmt_gammas(gammas) + ": " + res.certificate;
    v.cls = res.cls == PsdClass::PositiveDefinite ? LocalClass::SufficientHolds
            : res.cls == PsdClass::Indefinite     ? LocalClass::NecessaryFails
                                                  : LocalClass::Boundary;
    if (v.cls != LocalClass::SufficientHolds) {
        // at y = (1,...,1) Gamma equals the shifted diagonal matrix itself
        v.witness = detail::make_witness(std::vector<double>(c.size(), 1.0), c.matrix());
    }
    return v;
}

/// Closed-form decision matching the problem's shape, when one exists (Gini means, Sum or Product).
inline std::optional<LocalVerdict> closed_form_local(const InequalityProblem& pb)
{
    if (!pb.all_gini()) return std::nullopt;
    if (pb.phi.kind() == PhiKind::Sum) return decide_minkowski_local(gini_gammas(pb, -1.0), pb.box);
    if (pb.phi.kind() == PhiKind::Product) {
        auto g = gini_gammas(pb, 0.0);
        g[0] = -g[0];
        return decide_hoelder_local(g);
    }
    return std::nullopt;
}

/// Classifies Gamma on a grid (grid points per axis, 1% clipped, plus probes next to each end).
inline LocalVerdict local_scan(const GammaSpec& spec, std::size_t grid)
{
    if (grid < 3) throw domain_error("local scan needs at least 3 points per axis");
    const auto& pb = spec.problem();
    const auto pts = detail::scan_points(pb.box, grid, false);
    PsdClass worst;
    LocalVerdict v;
    v.witness =
        detail::scan_for_witness(pts, [&](std::span<const double> y) { return gamma_with_error(spec, y); }, worst);

    char buf[96];
    std::snprintf(buf, sizeof buf, "Gamma scanned at %zu points (grid %zu per axis)", pts.size(), grid);
    v.summary = buf;
    if (worst == PsdClass::Indefinite) {
        v.cls = LocalClass::NecessaryFails;
        v.summary += ": indefinite at a sampled point, semidefiniteness is necessary";
    } else if (worst == PsdClass::PositiveDefinite) {
        v.cls = LocalClass::SufficientHolds;
        v.summary += ": positive definite at every sampled point";
    } else {
        v.cls = LocalClass::Boundary;
        v.summary += ": semidefinite but singular at a sampled point";
    }

    if (auto cf = closed_form_local(pb)) {
        v.closed_form = cf->cls;
        v.closed_form_agrees = !contradicts(v.cls, cf->cls);
    }
    return v;
}

/// Numerical Hessian of Psi(u) = phi_0(Phi(phi_1^-1(u_1), ..., phi_k^-1(u_k))) at u = phi(y),
/// central differences with step 1e-4 max(1, |u_i|).
inline Matrix build_psi_probe(const GammaSpec& spec, std::span<const double> y)
{
    const auto& pb = spec.problem();
    if (!box_contains(pb.box, {y.begin(), y.end()})) throw domain_error("probe point outside the box");
    const auto outer = to_bajraktarevic(pb.left);
    std::vector<BajraktarevicSpec> inner;
    for (const auto& m : pb.right) inner.push_back(to_bajraktarevic(m));
    if (!outer.phi) throw capability_error("outer mean has no phi primitive");
    for (const auto& m : inner)
        if (!m.phi || !m.phi_inverse) throw capability_error("inner mean has no phi primitive or inverse");

    const std::size_t k = pb.k;
    std::vector<double> u(k), h(k);
    for (std::size_t j = 0; j < k; ++j) {
        u[j] = inner[j].phi(y[j]);
        h[j] = 1e-4 * std::max(1.0, std::abs(u[j]));
    }
    auto psi = [&](std::size_t a, double da, std::size_t b, double db) {
        std::vector<double> z(k);
        for (std::size_t j = 0; j < k; ++j) {
            double uj = u[j];
            if (j == a) uj += da;
            if (j == b) uj += db;
            z[j] = inner[j].phi_inverse(uj);
        }
        return outer.phi(pb.phi.value(z));
    };
    const double center = psi(k, 0, k, 0);
    Matrix hess(k, k);
    for (std::size_t a = 0; a < k; ++a) {
        hess(a, a) = (psi(a, h[a], k, 0) - 2.0 * center + psi(a, -h[a], k, 0)) / (h[a] * h[a]);
        for (std::size_t b = a + 1; b < k; ++b) {
            const double v = (psi(a, h[a], b, h[b]) - psi(a, h[a], b, -h[b]) - psi(a, -h[a], b, h[b]) +
                              psi(a, -h[a], b, -h[b])) /
                             (4.0 * h[a] * h[b]);
            hess(a, b) = hess(b, a) = v;
        }
    }
    return hess;
}

} // namespace meanineq
