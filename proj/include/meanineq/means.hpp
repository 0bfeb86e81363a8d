#pragma once

// Gini, power and nonsymmetric Bajraktarevic means, plus the chi auxiliary
// function used by the pointwise sufficient conditions.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "meanineq/errors.hpp"
#include "meanineq/interval.hpp"

namespace meanineq {

/// Exponent gap below which the r = s (logarithmic) branch is used.
inline constexpr double kSeamTolerance = 1e-9;

struct GiniParams {
    double r = 1.0;
    double s = 0.0;

    GiniParams() = default;
    GiniParams(double r_, double s_) : r(r_), s(s_)
    {
        if (!std::isfinite(r) || !std::isfinite(s)) throw domain_error("Gini exponents must be finite");
    }

    bool on_seam() const { return std::abs(r - s) < kSeamTolerance; }
    double sum() const { return r + s; }

    friend bool operator==(const GiniParams&, const GiniParams&) = default;
};

/// Positive weight vector, normalized to unit sum on construction.
class Weights {
public:
    Weights() = default;
    explicit Weights(std::vector<double> lambda) : lambda_(std::move(lambda))
    {
        if (lambda_.empty()) throw shape_error("weight vector is empty");
        double total = 0.0;
        for (double v : lambda_) {
            if (!(v > 0.0) || !std::isfinite(v)) throw domain_error("weights must be finite and positive");
            total += v;
        }
        for (double& v : lambda_) v /= total;
    }

    static Weights uniform(std::size_t n) { return Weights(std::vector<double>(n, 1.0)); }

    std::size_t size() const { return lambda_.size(); }
    double operator[](std::size_t i) const { return lambda_[i]; }
    std::span<const double> values() const { return lambda_; }

    bool is_uniform(double tol = 1e-12) const
    {
        const double u = 1.0 / static_cast<double>(lambda_.size());
        return std::all_of(lambda_.begin(), lambda_.end(), [&](double v) { return std::abs(v - u) <= tol; });
    }

    friend bool operator==(const Weights&, const Weights&) = default;

private:
    std::vector<double> lambda_;
};

namespace detail {

inline void check_positive_input(std::span<const double> x, std::size_t n)
{
    if (x.size() != n) throw shape_error("argument length does not match weight count");
    for (double v : x)
        if (!(v > 0.0) || !std::isfinite(v)) throw domain_error("mean arguments must be finite and positive");
}

inline std::vector<double> logs(std::span<const double> x)
{
    std::vector<double> out(x.size());
    std::transform(x.begin(), x.end(), out.begin(), [](double v) { return std::log(v); });
    return out;
}

// Logs of x divided by its weighted geometric mean. Means are evaluated on the centered
// vector and scaled back, which keeps |ln u| small and makes homogeneity exact up to ulps.
inline double center_logs(std::span<const double> lambda, std::vector<double>& lnx)
{
    double c = 0.0;
    for (std::size_t i = 0; i < lnx.size(); ++i) c += lambda[i] * lnx[i];
    for (double& l : lnx) l -= c;
    return c;
}

// ln(sum_i w_i exp(d a_i)) for weights summing to 1: log1p/expm1 while |d a_i| <= 1
// (relative accuracy as d -> 0), log-sum-exp otherwise (no overflow for large |d|).
inline double log_moment(std::span<const double> w, std::span<const double> a, double d)
{
    if (d == 0.0) return 0.0;
    double amax = 0.0;
    double top = -kInf;
    for (std::size_t i = 0; i < a.size(); ++i) {
        amax = std::max(amax, std::abs(d * a[i]));
        top = std::max(top, d * a[i] + std::log(w[i]));
    }
    double acc = 0.0;
    if (amax <= 1.0) {
        for (std::size_t i = 0; i < a.size(); ++i) acc += w[i] * std::expm1(d * a[i]);
        return std::log1p(acc);
    }
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::exp(d * a[i] + std::log(w[i]) - top);
    return top + std::log(acc);
}

// Normalized weights proportional to lambda_i exp(s a_i), computed in log space.
inline std::vector<double> tilted_weights(std::span<const double> lambda, std::span<const double> a, double s)
{
    std::vector<double> w(a.size());
    double top = -kInf;
    for (std::size_t i = 0; i < a.size(); ++i) {
        w[i] = std::log(lambda[i]) + s * a[i];
        top = std::max(top, w[i]);
    }
    double total = 0.0;
    for (double& v : w) total += (v = std::exp(v - top));
    for (double& v : w) v /= total;
    return w;
}

// Rounding can push a mean a few ulps outside [min x, max x]; the exact value never is.
inline double clamp_to_range(double v, std::span<const double> x)
{
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    return std::clamp(v, *lo, *hi);
}

// ln G_{r,s} - c = ln(sum w_i u_i^(r-s)) / (r-s) with w_i ~ lambda_i u_i^s and u = x / e^c.
// On the seam the limit sum w_i ln u_i is used.
inline double gini_unclamped(const GiniParams& params, const Weights& w, std::span<const double> x)
{
    auto a = logs(x);
    const double c = center_logs(w.values(), a);
    if (params.on_seam()) {
        const auto tw = tilted_weights(w.values(), a, 0.5 * params.sum());
        double acc = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) acc += tw[i] * a[i];
        return std::exp(c + acc);
    }
    const double d = params.r - params.s;
    const auto tw = tilted_weights(w.values(), a, params.s);
    return std::exp(c + log_moment(tw, a, d) / d);
}

inline double power_unclamped(double p, const Weights& w, std::span<const double> x)
{
    auto a = logs(x);
    const double c = center_logs(w.values(), a);
    if (p == 0.0) return std::exp(c);
    return std::exp(c + log_moment(w.values(), a, p) / p);
}

} // namespace detail

/// Weighted Gini mean G_{r,s;lambda}(x).
inline double gini_mean(const GiniParams& params, const Weights& w, std::span<const double> x)
{
    detail::check_positive_input(x, w.size());
    return detail::clamp_to_range(detail::gini_unclamped(params, w, x), x);
}

/// Weighted power (Hoelder) mean H_{p;lambda}(x); p = 0 is the weighted geometric mean.
inline double power_mean(double p, const Weights& w, std::span<const double> x)
{
    if (!std::isfinite(p)) throw domain_error("power mean exponent must be finite");
    detail::check_positive_input(x, w.size());
    return detail::clamp_to_range(detail::power_unclamped(p, w, x), x);
}

/// chi_{r,s}(t) = (t^r - t^s)/(r - s), or t^r ln t on the seam.
inline double chi(const GiniParams& params, double t)
{
    if (!(t > 0.0)) throw domain_error("chi requires t > 0");
    const double lt = std::log(t);
    if (params.on_seam()) {
        const double rho = 0.5 * (params.r + params.s);
        return std::exp(rho * lt) * lt;
    }
    const double d = params.r - params.s;
    return std::exp(params.s * lt) * std::expm1(d * lt) / d;
}

// ---------------------------------------------------------------------------
// General nonsymmetric Bajraktarevic means

using ScalarFn = std::function<double(double)>;

/// The generator f of a Bajraktarevic mean. second_derivative may be empty when
/// only first-order analysis is needed; inverse is always required.
struct GeneratorMap {
    ScalarFn value;
    ScalarFn derivative;
    ScalarFn second_derivative;
    ScalarFn inverse;
};

struct WeightMap {
    ScalarFn value;
    ScalarFn derivative;  // optional
};

struct BajraktarevicSpec {
    GeneratorMap f;
    std::vector<WeightMap> p;
    Interval domain;
    // Optional primitive of p0^2 f' and its inverse (needed for the Psi convexification).
    ScalarFn phi;
    ScalarFn phi_inverse;

    std::size_t arity() const { return p.size(); }

    bool has_second_order() const
    {
        if (!f.second_derivative) return false;
        return std::all_of(p.begin(), p.end(), [](const WeightMap& m) { return static_cast<bool>(m.derivative); });
    }

    double weight_total(double t) const
    {
        double acc = 0.0;
        for (const auto& m : p) acc += m.value(t);
        return acc;
    }

    double weight_total_derivative(double t) const
    {
        double acc = 0.0;
        for (const auto& m : p) {
            if (!m.derivative) throw capability_error("weight function derivative not supplied");
            acc += m.derivative(t);
        }
        return acc;
    }
};

/// Checks the construction invariants of a Bajraktarevic spec by sampling the domain:
/// f' finite, nonzero and of constant sign, every p_l finite and positive.
inline void validate(const BajraktarevicSpec& spec, std::size_t samples = 64)
{
    if (!spec.f.value || !spec.f.derivative || !spec.f.inverse)
        throw capability_error("generator needs value, derivative and inverse");
    if (spec.p.empty()) throw shape_error("Bajraktarevic spec needs at least one weight function");
    for (const auto& m : spec.p)
        if (!m.value) throw capability_error("weight function value not supplied");

    SamplingOptions opt;
    opt.geometric = false;
    int sign = 0;
    for (double t : axis_samples(spec.domain, samples, opt)) {
        const double d = spec.f.derivative(t);
        if (!std::isfinite(d) || d == 0.0) throw domain_error("generator derivative vanishes on the domain");
        const int sg = d > 0 ? 1 : -1;
        if (sign != 0 && sg != sign) throw domain_error("generator derivative changes sign on the domain");
        sign = sg;
        for (const auto& m : spec.p) {
            const double v = m.value(t);
            if (!(v > 0.0) || !std::isfinite(v)) throw domain_error("weight function not positive on the domain");
        }
    }
}

inline BajraktarevicSpec make_bajraktarevic(GeneratorMap f, std::vector<WeightMap> p, Interval domain)
{
    BajraktarevicSpec spec{std::move(f), std::move(p), domain, {}, {}};
    validate(spec);
    return spec;
}

/// A_{f,p}(x) = f^{-1}( sum p_l(x_l) f(x_l) / sum p_l(x_l) ).
inline double bajraktarevic_mean(const BajraktarevicSpec& spec, std::span<const double> x)
{
    if (x.size() != spec.arity()) throw shape_error("argument length does not match weight function count");
    double num = 0.0;
    double den = 0.0;
    double lo = kInf;
    double hi = -kInf;
    for (std::size_t l = 0; l < x.size(); ++l) {
        if (!spec.domain.contains(x[l])) throw domain_error("mean argument outside the generator domain");
        const double w = spec.p[l].value(x[l]);
        num += w * spec.f.value(x[l]);
        den += w;
        lo = std::min(lo, x[l]);
        hi = std::max(hi, x[l]);
    }
    const double v = spec.f.inverse(num / den);
    if (!std::isfinite(v)) throw numeric_error("generator inverse returned a non-finite value");
    // strict-mean property; absorbs rounding of f^{-1}(f(c))
    if (v < lo - 1e-9 * std::max(1.0, std::abs(lo)) || v > hi + 1e-9 * std::max(1.0, std::abs(hi)))
        throw numeric_error("generator inverse left the range of the arguments");
    return std::clamp(v, lo, hi);
}

// ---------------------------------------------------------------------------
// MeanSpec: either a Gini mean or a general Bajraktarevic spec

struct GiniMean {
    GiniParams params;
    Weights weights;
};

using MeanSpec = std::variant<GiniMean, BajraktarevicSpec>;

inline MeanSpec gini(double r, double s, Weights w) { return GiniMean{GiniParams(r, s), std::move(w)}; }
inline MeanSpec power(double p, Weights w) { return GiniMean{GiniParams(p, 0.0), std::move(w)}; }

inline const GiniMean* as_gini(const MeanSpec& m) { return std::get_if<GiniMean>(&m); }

inline std::size_t arity(const MeanSpec& m)
{
    if (auto g = as_gini(m)) return g->weights.size();
    return std::get<BajraktarevicSpec>(m).arity();
}

inline Interval domain_of(const MeanSpec& m)
{
    if (as_gini(m)) return Interval::positive();
    return std::get<BajraktarevicSpec>(m).domain;
}

inline double evaluate(const MeanSpec& m, std::span<const double> x)
{
    if (auto g = as_gini(m)) return gini_mean(g->params, g->weights, x);
    return bajraktarevic_mean(std::get<BajraktarevicSpec>(m), x);
}

/// Bajraktarevic representation of a Gini mean: f(t) = t^{r-s} (ln t on the seam),
/// p_l(t) = lambda_l t^s, together with the closed-form primitive of p0^2 f'.
inline BajraktarevicSpec to_bajraktarevic(const GiniMean& g)
{
    BajraktarevicSpec spec;
    spec.domain = Interval::positive();
    const double r = g.params.r;
    const double s = g.params.s;
    const double sum = r + s;

    if (g.params.on_seam()) {
        const double rho = 0.5 * sum;
        spec.f = GeneratorMap{[](double t) { return std::log(t); }, [](double t) { return 1.0 / t; },
                              [](double t) { return -1.0 / (t * t); }, [](double v) { return std::exp(v); }};
        for (std::size_t l = 0; l < g.weights.size(); ++l) {
            const double lam = g.weights[l];
            spec.p.push_back({[=](double t) { return lam * std::pow(t, rho); },
                              [=](double t) { return lam * rho * std::pow(t, rho - 1.0); }});
        }
        // p0^2 f' = t^{2 rho - 1}
        const double a = 2.0 * rho;
        if (std::abs(a) < 1e-12) {
            spec.phi = [](double t) { return std::log(t); };
            spec.phi_inverse = [](double u) { return std::exp(u); };
        } else {
            spec.phi = [=](double t) { return std::expm1(a * std::log(t)) / a; };
            spec.phi_inverse = [=](double u) { return std::exp(std::log1p(a * u) / a); };
        }
        return spec;
    }

    const double d = r - s;
    spec.f = GeneratorMap{[=](double t) { return std::pow(t, d); }, [=](double t) { return d * std::pow(t, d - 1.0); },
                          [=](double t) { return d * (d - 1.0) * std::pow(t, d - 2.0); },
                          [=](double v) { return std::pow(v, 1.0 / d); }};
    for (std::size_t l = 0; l < g.weights.size(); ++l) {
        const double lam = g.weights[l];
        spec.p.push_back({[=](double t) { return lam * std::pow(t, s); },
                          [=](double t) { return lam * s * std::pow(t, s - 1.0); }});
    }
    // p0^2 f' = d t^{r+s-1}; primitive taken as d (t^{r+s} - 1)/(r+s), smooth across r+s = 0
    if (std::abs(sum) < 1e-12) {
        spec.phi = [=](double t) { return d * std::log(t); };
        spec.phi_inverse = [=](double u) { return std::exp(u / d); };
    } else {
        spec.phi = [=](double t) { return d * std::expm1(sum * std::log(t)) / sum; };
        spec.phi_inverse = [=](double u) { return std::exp(std::log1p(sum * u / d) / sum); };
    }
    return spec;
}

inline BajraktarevicSpec to_bajraktarevic(const MeanSpec& m)
{
    if (auto g = as_gini(m)) return to_bajraktarevic(*g);
    return std::get<BajraktarevicSpec>(m);
}

/// 2 p0'/p0 + f''/f' at t: the per-mean bracket of the Gamma matrix.
/// For Gini means this is (r + s - 1)/t.
inline double curvature_term(const MeanSpec& m, double t)
{
    if (auto g = as_gini(m)) return (g->params.sum() - 1.0) / t;
    const auto& b = std::get<BajraktarevicSpec>(m);
    if (!b.has_second_order()) throw capability_error("curvature term needs f'' and p'");
    return 2.0 * b.weight_total_derivative(t) / b.weight_total(t) + b.f.second_derivative(t) / b.f.derivative(t);
}

/// p0(y) (f(y) - f(u)) / (p0(u) f'(u)); equals u chi_{r,s}(y/u) for Gini means.
inline double gsc0_term(const MeanSpec& m, double u, double y)
{
    if (auto g = as_gini(m)) return u * chi(g->params, y / u);
    const auto& b = std::get<BajraktarevicSpec>(m);
    return b.weight_total(y) * (b.f.value(y) - b.f.value(u)) / (b.weight_total(u) * b.f.derivative(u));
}

/// Sign of the generator derivative (+1 or -1).
inline int generator_sign(const MeanSpec& m)
{
    if (auto g = as_gini(m)) return (g->params.on_seam() || g->params.r > g->params.s) ? 1 : -1;
    const auto& b = std::get<BajraktarevicSpec>(m);
    auto [lo, hi] = effective_range(b.domain, 1e6);
    return b.f.derivative(0.5 * (lo + hi)) > 0 ? 1 : -1;
}

inline std::string describe(const MeanSpec& m)
{
    if (auto g = as_gini(m)) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "gini(%.17g,%.17g)", g->params.r, g->params.s);
        return buf;
    }
    return "bajraktarevic(custom)";
}

} // namespace meanineq
