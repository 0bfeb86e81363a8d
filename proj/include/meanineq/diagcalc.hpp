#pragma once

// Diagonal calculus: partial derivatives of Bajraktarevic means on the diagonal,
// the deficiency function F of a coupled mean inequality and its diagonal
// derivatives, with finite-difference cross-checks.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "meanineq/errors.hpp"
#include "meanineq/interval.hpp"
#include "meanineq/matrix.hpp"
#include "meanineq/means.hpp"

namespace meanineq {

enum class PhiKind { Sum, Product, Custom };

inline const char* to_string(PhiKind k)
{
    switch (k) {
    case PhiKind::Sum: return "sum";
    case PhiKind::Product: return "product";
    case PhiKind::Custom: return "custom";
    }
    return "?";
}

/// The coupling map Phi: I_1 x ... x I_k -> I_0.
class PhiSpec {
public:
    using ValueFn = std::function<double(std::span<const double>)>;
    using GradientFn = std::function<std::vector<double>(std::span<const double>)>;
    using HessianFn = std::function<Matrix(std::span<const double>)>;

    static PhiSpec sum() { return PhiSpec(PhiKind::Sum); }
    static PhiSpec product() { return PhiSpec(PhiKind::Product); }
    static PhiSpec custom(ValueFn value, GradientFn gradient, HessianFn hessian, Interval codomain)
    {
        PhiSpec p(PhiKind::Custom);
        p.value_ = std::move(value);
        p.gradient_ = std::move(gradient);
        p.hessian_ = std::move(hessian);
        p.codomain_ = codomain;
        return p;
    }

    PhiKind kind() const { return kind_; }

    double value(std::span<const double> y) const
    {
        switch (kind_) {
        case PhiKind::Sum: return std::accumulate(y.begin(), y.end(), 0.0);
        case PhiKind::Product: return std::accumulate(y.begin(), y.end(), 1.0, std::multiplies<>());
        case PhiKind::Custom: return value_(y);
        }
        return 0.0;
    }

    std::vector<double> gradient(std::span<const double> y) const
    {
        switch (kind_) {
        case PhiKind::Sum: return std::vector<double>(y.size(), 1.0);
        case PhiKind::Product: {
            std::vector<double> g(y.size());
            for (std::size_t i = 0; i < y.size(); ++i) g[i] = product_except(y, i, y.size());
            return g;
        }
        case PhiKind::Custom: return gradient_(y);
        }
        return {};
    }

    Matrix hessian(std::span<const double> y) const
    {
        const std::size_t k = y.size();
        switch (kind_) {
        case PhiKind::Sum: return Matrix(k, k);
        case PhiKind::Product: {
            Matrix h(k, k);
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < k; ++j)
                    if (i != j) h(i, j) = product_except(y, i, j);
            return h;
        }
        case PhiKind::Custom: return hessian_(y);
        }
        return {};
    }

    /// Range of Phi over an open box (exact for Sum/Product; the declared codomain for Custom).
    Interval image(const Box& box) const
    {
        switch (kind_) {
        case PhiKind::Sum: {
            double lo = 0.0, hi = 0.0;
            for (const auto& iv : box) {
                lo += iv.lo;
                hi += iv.hi;
            }
            return {lo, hi};
        }
        case PhiKind::Product: {
            double lo = 1.0, hi = 1.0;
            for (const auto& iv : box) {
                if (!iv.on_positive_axis()) throw domain_error("product coupling needs positive intervals");
                lo *= iv.lo;
                hi *= iv.hi;
            }
            return {lo, hi};
        }
        case PhiKind::Custom: return codomain_;
        }
        return {};
    }

private:
    explicit PhiSpec(PhiKind k) : kind_(k) {}

    static double product_except(std::span<const double> y, std::size_t a, std::size_t b)
    {
        double p = 1.0;
        for (std::size_t i = 0; i < y.size(); ++i)
            if (i != a && i != b) p *= y[i];
        return p;
    }

    PhiKind kind_;
    ValueFn value_;
    GradientFn gradient_;
    HessianFn hessian_;
    Interval codomain_;
};

/// M_0(Phi(x_1),...,Phi(x_n)) <= Phi(M_1(x^1),...,M_k(x^k)) over x with column j in box[j]^n.
struct InequalityProblem {
    std::size_t n = 0;
    std::size_t k = 0;
    MeanSpec left;
    std::vector<MeanSpec> right;
    PhiSpec phi = PhiSpec::sum();
    Box box;

    InequalityProblem(MeanSpec left_, std::vector<MeanSpec> right_, PhiSpec phi_, Box box_)
        : left(std::move(left_)), right(std::move(right_)), phi(std::move(phi_)), box(std::move(box_))
    {
        k = right.size();
        n = arity(left);
        if (k < 2) throw shape_error("inequality problem needs at least two inner means");
        if (n < 2) throw shape_error("inequality problem needs at least two variables");
        if (box.size() != k) throw shape_error("box dimension does not match the number of inner means");
        for (std::size_t j = 0; j < k; ++j) {
            if (arity(right[j]) != n) throw shape_error("inner mean arity differs from the outer mean");
            if (!domain_of(right[j]).contains(box[j])) throw domain_error("inner mean domain does not contain its interval");
        }
        if (!domain_of(left).contains(phi.image(box))) throw domain_error("outer mean domain does not contain Phi(box)");
        if (phi.kind() == PhiKind::Custom) check_custom_phi();
    }

    bool all_gini() const
    {
        if (!as_gini(left)) return false;
        return std::all_of(right.begin(), right.end(), [](const MeanSpec& m) { return as_gini(m) != nullptr; });
    }

private:
    // A continuous partial that is zero or changes sign on the sample grid vanishes somewhere.
    void check_custom_phi() const
    {
        std::vector<std::vector<double>> axes;
        for (const auto& iv : box) axes.push_back(axis_samples(iv, 9));
        std::vector<std::size_t> idx(k, 0);
        std::vector<double> y(k);
        std::vector<int> sign(k, 0);
        while (true) {
            for (std::size_t j = 0; j < k; ++j) y[j] = axes[j][idx[j]];
            const auto g = phi.gradient(y);
            if (g.size() != k) throw shape_error("custom Phi gradient has the wrong length");
            for (std::size_t i = 0; i < k; ++i) {
                if (!std::isfinite(g[i]) || g[i] == 0.0) throw domain_error("custom Phi has a vanishing first partial");
                const int sg = g[i] > 0 ? 1 : -1;
                if (sign[i] != 0 && sign[i] != sg) throw domain_error("custom Phi has a vanishing first partial");
                sign[i] = sg;
            }
            std::size_t j = 0;
            while (j < k && ++idx[j] == axes[j].size()) idx[j++] = 0;
            if (j == k) break;
        }
    }
};

/// Delta_n^k(y): the n x k matrix whose j-th column is constant y_j.
inline Matrix diagonal_point(std::size_t n, std::span<const double> y)
{
    Matrix x(n, y.size());
    for (std::size_t l = 0; l < n; ++l)
        for (std::size_t j = 0; j < y.size(); ++j) x(l, j) = y[j];
    return x;
}

struct Sides {
    double lhs = 0.0;  // M_0(Phi(x_1),...,Phi(x_n))
    double rhs = 0.0;  // Phi(M_1(x^1),...,M_k(x^k))
    double gap() const { return rhs - lhs; }
};

inline Sides evaluate_sides(const InequalityProblem& pb, const Matrix& x)
{
    if (x.rows() != pb.n || x.cols() != pb.k) throw shape_error("argument matrix must be n x k");
    for (std::size_t l = 0; l < pb.n; ++l)
        for (std::size_t j = 0; j < pb.k; ++j)
            if (!pb.box[j].contains(x(l, j))) throw domain_error("argument entry outside its interval");

    std::vector<double> inner(pb.k);
    for (std::size_t j = 0; j < pb.k; ++j) inner[j] = evaluate(pb.right[j], x.column(j));
    std::vector<double> rows(pb.n);
    for (std::size_t l = 0; l < pb.n; ++l) rows[l] = pb.phi.value(x.row(l));
    return {evaluate(pb.left, rows), pb.phi.value(inner)};
}

/// F(x) = Phi(M_1(x^1),...,M_k(x^k)) - M_0(Phi(x_1),...,Phi(x_n)); the inequality holds at x iff F(x) >= 0.
inline double deficiency(const InequalityProblem& pb, const Matrix& x) { return evaluate_sides(pb, x).gap(); }

// ---------------------------------------------------------------------------
// Diagonal partials of a Bajraktarevic mean

/// d_l A_{f,p} on the diagonal: p_l(t)/p_0(t).
inline std::vector<double> diag_first_partials(const BajraktarevicSpec& spec, double t)
{
    if (!spec.domain.contains(t)) throw domain_error("diagonal point outside the generator domain");
    std::vector<double> out(spec.arity());
    double p0 = 0.0;
    for (std::size_t l = 0; l < out.size(); ++l) {
        out[l] = spec.p[l].value(t);
        p0 += out[l];
    }
    for (double& v : out) v /= p0;
    return out;
}

/// d_l d_m A_{f,p} on the diagonal.
inline Matrix diag_second_partials(const BajraktarevicSpec& spec, double t)
{
    if (!spec.has_second_order()) throw capability_error("second partials need f'' and every p_l'");
    if (!spec.domain.contains(t)) throw domain_error("diagonal point outside the generator domain");
    const std::size_t n = spec.arity();
    std::vector<double> p(n), dp(n);
    double p0 = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        p[l] = spec.p[l].value(t);
        dp[l] = spec.p[l].derivative(t);
        p0 += p[l];
    }
    const double ratio = spec.f.second_derivative(t) / spec.f.derivative(t);
    const double p0sq = p0 * p0;
    Matrix h(n, n);
    for (std::size_t l = 0; l < n; ++l) {
        for (std::size_t m = 0; m < n; ++m) {
            if (l == m)
                h(l, l) = 2.0 * dp[l] * (p0 - p[l]) / p0sq + p[l] * (p0 - p[l]) / p0sq * ratio;
            else
                h(l, m) = -(dp[l] * p[m] + p[l] * dp[m]) / p0sq - p[l] * p[m] / p0sq * ratio;
        }
    }
    return h;
}

inline std::vector<double> diag_first_partials(const MeanSpec& m, double t)
{
    if (auto g = as_gini(m)) {
        if (!(t > 0.0)) throw domain_error("Gini diagonal point must be positive");
        return {g->weights.values().begin(), g->weights.values().end()};
    }
    return diag_first_partials(std::get<BajraktarevicSpec>(m), t);
}

inline Matrix diag_second_partials(const MeanSpec& m, double t) { return diag_second_partials(to_bajraktarevic(m), t); }

// ---------------------------------------------------------------------------
// Weight proportionality p_l = lambda_l p_0

/// Samples p_l/p_0 on an equispaced interior grid; returns the common ratio vector when it
/// is constant to within 1e-9, otherwise nothing (proportionality necessary condition fails).
inline std::optional<Weights> weight_proportionality_check(const BajraktarevicSpec& spec, std::size_t samples)
{
    if (samples < 2) throw domain_error("proportionality check needs at least two samples");
    SamplingOptions opt;
    opt.geometric = false;
    const auto ts = axis_samples(spec.domain, samples, opt);
    std::vector<double> first;
    std::vector<double> acc(spec.arity(), 0.0);
    for (double t : ts) {
        const auto ratios = diag_first_partials(spec, t);
        for (double v : ratios)
            if (!std::isfinite(v)) throw domain_error("weight ratio is not finite on the sampling grid");
        if (first.empty()) first = ratios;
        for (std::size_t l = 0; l < ratios.size(); ++l) {
            if (std::abs(ratios[l] - first[l]) > 1e-9) return std::nullopt;
            acc[l] += ratios[l];
        }
    }
    return Weights(acc);
}

inline std::optional<Weights> weight_proportionality_check(const MeanSpec& m, std::size_t samples)
{
    if (auto g = as_gini(m)) return g->weights;
    return weight_proportionality_check(std::get<BajraktarevicSpec>(m), samples);
}

/// Common lambda of all means of a problem, if every mean has proportional weights with the same ratios.
inline std::optional<Weights> common_weights(const InequalityProblem& pb, std::size_t samples = 32)
{
    auto w0 = weight_proportionality_check(pb.left, samples);
    if (!w0) return std::nullopt;
    for (const auto& m : pb.right) {
        auto wj = weight_proportionality_check(m, samples);
        if (!wj) return std::nullopt;
        for (std::size_t l = 0; l < pb.n; ++l)
            if (std::abs((*wj)[l] - (*w0)[l]) > 1e-9) return std::nullopt;
    }
    return w0;
}

// ---------------------------------------------------------------------------
// Derivatives of F on the diagonal

/// Analytic first partials of F at Delta_n^k(y); entry i*n + l is d/dx_l^i.
inline std::vector<double> deficiency_first_partials(const InequalityProblem& pb, std::span<const double> y)
{
    const std::size_t n = pb.n, k = pb.k;
    const auto grad = pb.phi.gradient(y);
    const auto outer = diag_first_partials(pb.left, pb.phi.value(y));
    std::vector<double> out(n * k);
    for (std::size_t i = 0; i < k; ++i) {
        const auto inner = diag_first_partials(pb.right[i], y[i]);
        for (std::size_t l = 0; l < n; ++l) out[i * n + l] = grad[i] * (inner[l] - outer[l]);
    }
    return out;
}

/// Analytic Hessian of F at Delta_n^k(y), same variable ordering as deficiency_first_partials.
inline Matrix deficiency_second_partials(const InequalityProblem& pb, std::span<const double> y)
{
    const std::size_t n = pb.n, k = pb.k;
    const double phi_y = pb.phi.value(y);
    const auto grad = pb.phi.gradient(y);
    const auto hess = pb.phi.hessian(y);
    const auto d0 = diag_first_partials(pb.left, phi_y);
    const auto h0 = diag_second_partials(pb.left, phi_y);
    std::vector<std::vector<double>> d(k);
    std::vector<Matrix> h(k);
    for (std::size_t j = 0; j < k; ++j) {
        d[j] = diag_first_partials(pb.right[j], y[j]);
        h[j] = diag_second_partials(pb.right[j], y[j]);
    }
    Matrix out(n * k, n * k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            for (std::size_t l = 0; l < n; ++l)
                for (std::size_t m = 0; m < n; ++m) {
                    const double kron_lm = l == m ? 1.0 : 0.0;
                    double v = hess(i, j) * (d[j][m] * d[i][l] - kron_lm * d0[m]);
                    v -= grad[j] * (grad[i] * h0(l, m) - (i == j ? h[j](l, m) : 0.0));
                    out(i * n + l, j * n + m) = v;
                }
    return out;
}

struct DerivativeCheckReport {
    std::vector<double> first_analytic;
    std::vector<double> first_numeric;
    Matrix second_analytic;
    Matrix second_numeric;
    double max_abs_deviation = 0.0;
    // deviation divided by max(1, largest analytic entry) of the same block
    double max_rel_deviation = 0.0;
    std::vector<std::string> assumptions;
};

/// Compares the analytic diagonal derivatives of F with central differences of deficiency().
/// Steps: first order 1e-5 max(1,|y_j|), second order 1e-4 max(1,|y_j|) unless overridden.
inline DerivativeCheckReport deficiency_gradient_check(const InequalityProblem& pb, std::span<const double> y,
                                                       double first_step = 1e-5, double second_step = 1e-4)
{
    const std::size_t n = pb.n, k = pb.k, dim = n * k;
    if (!box_contains(pb.box, {y.begin(), y.end()})) throw domain_error("diagonal point outside the box");

    DerivativeCheckReport rep;
    rep.first_analytic = deficiency_first_partials(pb, y);
    rep.second_analytic = deficiency_second_partials(pb, y);
    if (pb.phi.kind() == PhiKind::Custom) rep.assumptions.emplace_back("surjectivity of custom Phi not verified");

    const Matrix base = diagonal_point(n, y);
    auto F = [&](const Matrix& x) { return deficiency(pb, x); };
    auto step_of = [&](std::size_t var, double c) { return c * std::max(1.0, std::abs(y[var / n])); };
    auto shifted = [&](std::initializer_list<std::pair<std::size_t, double>> moves) {
        Matrix x = base;
        for (auto [var, delta] : moves) x(var % n, var / n) += delta;
        return x;
    };

    rep.first_numeric.resize(dim);
    for (std::size_t a = 0; a < dim; ++a) {
        const double h = step_of(a, first_step);
        rep.first_numeric[a] = (F(shifted({{a, h}})) - F(shifted({{a, -h}}))) / (2.0 * h);
    }

    rep.second_numeric = Matrix(dim, dim);
    const double f0 = F(base);
    for (std::size_t a = 0; a < dim; ++a) {
        const double ha = step_of(a, second_step);
        rep.second_numeric(a, a) = (F(shifted({{a, ha}})) - 2.0 * f0 + F(shifted({{a, -ha}}))) / (ha * ha);
        for (std::size_t b = a + 1; b < dim; ++b) {
            const double hb = step_of(b, second_step);
            const double v = (F(shifted({{a, ha}, {b, hb}})) - F(shifted({{a, ha}, {b, -hb}})) -
                              F(shifted({{a, -ha}, {b, hb}})) + F(shifted({{a, -ha}, {b, -hb}}))) /
                             (4.0 * ha * hb);
            rep.second_numeric(a, b) = v;
            rep.second_numeric(b, a) = v;
        }
    }

    double first_scale = 1.0;
    for (double v : rep.first_analytic) first_scale = std::max(first_scale, std::abs(v));
    const double second_scale = std::max(1.0, rep.second_analytic.max_abs());
    for (std::size_t a = 0; a < dim; ++a) {
        const double dev = std::abs(rep.first_analytic[a] - rep.first_numeric[a]);
        rep.max_abs_deviation = std::max(rep.max_abs_deviation, dev);
        rep.max_rel_deviation = std::max(rep.max_rel_deviation, dev / first_scale);
        for (std::size_t b = 0; b < dim; ++b) {
            const double dv = std::abs(rep.second_analytic(a, b) - rep.second_numeric(a, b));
            rep.max_abs_deviation = std::max(rep.max_abs_deviation, dv);
            rep.max_rel_deviation = std::max(rep.max_rel_deviation, dv / second_scale);
        }
    }
    return rep;
}

} // namespace meanineq
