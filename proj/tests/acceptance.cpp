// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "meanineq/diagcalc.hpp"
#include "meanineq/global.hpp"
#include "meanineq/local.hpp"
#include "meanineq/psd.hpp"
#include "meanineq/search.hpp"

using namespace meanineq;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double log_uniform(std::mt19937_64& rng, double lo, double hi)
{
    return std::exp(std::uniform_real_distribution<double>(std::log(lo), std::log(hi))(rng));
}

Weights random_weights(std::mt19937_64& rng, std::size_t n)
{
    std::uniform_real_distribution<double> u(0.1, 1.0);
    std::vector<double> w(n);
    for (double& v : w) v = u(rng);
    return Weights(w);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

// --- 1 -----------------------------------------------------------------------------------

// (sum lambda x^r)^(1/r) in long double, geometric mean at r = 0
double power_mean_oracle(double r, const Weights& w, const std::vector<double>& x)
{
    // renormalize: 1/r amplifies the rounding in sum(w) - 1 when |r| is tiny
    long double acc = 0.0L, total = 0.0L;
    for (std::size_t i = 0; i < x.size(); ++i) total += (long double)w[i];
    if (r == 0.0) {
        for (std::size_t i = 0; i < x.size(); ++i) acc += (long double)w[i] / total * std::log((long double)x[i]);
        return (double)std::exp(acc);
    }
    for (std::size_t i = 0; i < x.size(); ++i)
        acc += (long double)w[i] / total * std::pow((long double)x[i], (long double)r);
    return (double)std::pow(acc, 1.0L / (long double)r);
}

Outcome criterion_reductions()
{
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> ur(-5, 5);
    double worst = 0.0;
    for (int it = 0; it < 10000; ++it) {
        const std::size_t n = 2 + it % 5;
        const auto w = random_weights(rng, n);
        std::vector<double> x(n);
        for (double& v : x) v = log_uniform(rng, 1e-3, 1e3);
        const double r = ur(rng);
        const double g = gini_mean({r, 0.0}, w, x), h = power_mean(r, w, x), o = power_mean_oracle(r, w, x);
        worst = std::max({worst, std::abs(g - h) / std::abs(h), std::abs(g - o) / std::abs(o)});
    }
    return {worst <= 1e-12, fmt("10^4 instances, max relative error %.3g", worst)};
}

// --- 2 -----------------------------------------------------------------------------------

struct ScalarWithDerivs {
    std::function<double(double)> v, d, dd, inv;
};

BajraktarevicSpec random_custom_spec(std::mt19937_64& rng)
{
    static const std::vector<ScalarWithDerivs> gens{
        {[](double t) { return std::exp(t); }, [](double t) { return std::exp(t); },
         [](double t) { return std::exp(t); }, [](double v) { return std::log(v); }},
        {[](double t) { return std::log(t); }, [](double t) { return 1 / t; }, [](double t) { return -1 / (t * t); },
         [](double v) { return std::exp(v); }},
        {[](double t) { return t * t * t; }, [](double t) { return 3 * t * t; }, [](double t) { return 6 * t; },
         [](double v) { return std::cbrt(v); }},
        {[](double t) { return 1 / t; }, [](double t) { return -1 / (t * t); },
         [](double t) { return 2 / (t * t * t); }, [](double v) { return 1 / v; }},
        {[](double t) { return std::sqrt(t); }, [](double t) { return 0.5 / std::sqrt(t); },
         [](double t) { return -0.25 / (t * std::sqrt(t)); }, [](double v) { return v * v; }},
    };
    static const std::vector<WeightMap> weights{
        {[](double t) { return 1 + t; }, [](double) { return 1.0; }},
        {[](double t) { return 2 + std::sin(t); }, [](double t) { return std::cos(t); }},
        {[](double t) { return t * t; }, [](double t) { return 2 * t; }},
        {[](double t) { return std::exp(t / 3); }, [](double t) { return std::exp(t / 3) / 3; }},
        {[](double t) { return 1 / (1 + t); }, [](double t) { return -1 / ((1 + t) * (1 + t)); }},
    };
    std::uniform_int_distribution<std::size_t> pick(0, 4), arity(2, 3);
    const auto& g = gens[pick(rng)];
    std::vector<WeightMap> p;
    for (std::size_t i = 0, n = arity(rng); i < n; ++i) p.push_back(weights[pick(rng)]);
    return make_bajraktarevic({g.v, g.d, g.dd, g.inv}, p, Interval(0.5, 3.0));
}

// normwise relative deviation of analytic diagonal partials from central differences of `mean`
double partials_deviation(const std::vector<double>& first, const Matrix& second, double t, std::size_t n,
                          const std::function<double(const std::vector<double>&)>& mean)
{
    auto at = [&](std::size_t a, double da, std::size_t b, double db) {
        std::vector<double> x(n, t);
        if (a < n) x[a] += da;
        if (b < n) x[b] += db;
        return mean(x);
    };
    const double h1 = 1e-5 * t, h2 = 1e-4 * t;
    double d1 = 0.0, s1 = 1.0, d2 = 0.0, s2 = std::max(1.0, second.max_abs());
    for (std::size_t a = 0; a < n; ++a) {
        d1 = std::max(d1, std::abs((at(a, h1, n, 0) - at(a, -h1, n, 0)) / (2 * h1) - first[a]));
        s1 = std::max(s1, std::abs(first[a]));
        for (std::size_t b = 0; b < n; ++b) {
            const double fd = a == b ? (at(a, h2, n, 0) - 2 * at(n, 0, n, 0) + at(a, -h2, n, 0)) / (h2 * h2)
                                     : (at(a, h2, b, h2) - at(a, h2, b, -h2) - at(a, -h2, b, h2) + at(a, -h2, b, -h2)) /
                                           (4 * h2 * h2);
            d2 = std::max(d2, std::abs(fd - second(a, b)));
        }
    }
    return std::max(d1 / s1, d2 / s2);
}

Outcome criterion_derivatives()
{
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> par(-3, 3), tc(0.7, 2.5);
    double worst_gini = 0.0, worst_custom = 0.0;
    for (int it = 0; it < 200; ++it) {
        const std::size_t n = 2 + it % 4;
        const auto m = gini(par(rng), par(rng), random_weights(rng, n));
        const double t = log_uniform(rng, 0.1, 10);
        worst_gini = std::max(worst_gini, partials_deviation(diag_first_partials(m, t), diag_second_partials(m, t), t, n,
                                                             [&](const std::vector<double>& x) { return evaluate(m, x); }));
    }
    for (int it = 0; it < 50; ++it) {
        const auto spec = random_custom_spec(rng);
        const double t = tc(rng);
        worst_custom = std::max(
            worst_custom, partials_deviation(diag_first_partials(spec, t), diag_second_partials(spec, t), t, spec.arity(),
                                             [&](const std::vector<double>& x) { return bajraktarevic_mean(spec, x); }));
    }
    const double worst = std::max(worst_gini, worst_custom);
    return {worst <= 1e-5, fmt("200 Gini + 50 custom specs, max relative error %.3g (Gini %.3g, custom %.3g)", worst,
                               worst_gini, worst_custom)};
}

// --- 3 -----------------------------------------------------------------------------------

Outcome criterion_psd_oracle()
{
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> u(-5, 5);
    std::size_t disagreements = 0, banded = 0;
    for (int it = 0; it < 100000; ++it) {
        const std::size_t k = 2 + it % 7;
        std::vector<double> c(k);
        for (double& v : c) v = u(rng);
        ShiftedDiagonal m(u(rng), c);
        const auto e = jacobi_eigen(m.matrix());
        const double band = 1e-9 * std::max(1.0, std::max(std::abs(e.values.front()), std::abs(e.values.back())));
        if (std::abs(e.values.front()) <= band) {
            ++banded;
            continue;
        }
        const PsdClass oracle = e.values.front() > 0 ? PsdClass::PositiveDefinite : PsdClass::Indefinite;
        disagreements += classify_shifted_diagonal(m).cls != oracle;
    }
    return {disagreements == 0, fmt("10^5 instances, %.0f disagreements outside the band, %.0f inside the band",
                                     double(disagreements), double(banded))};
}

// --- 4 -----------------------------------------------------------------------------------

Outcome criterion_classical()
{
    const Box box{Interval::positive(), Interval::positive()};
    const auto w = Weights::uniform(2);
    bool ok = true;
    std::string notes;
    double weakest_fail = -kInf;
    for (double p : {0.25, 0.5, 0.99, 1.0, 1.5, 2.0, 3.0}) {
        const auto v = decide_minkowski_global({{p, 0}, {p, 0}, {p, 0}});
        const bool holds = v.cls == GlobalClass::HoldsGlobal;
        InequalityProblem pb(power(p, w), {power(p, w), power(p, w)}, PhiSpec::sum(), box);
        const auto cx = search_global(pb, 100000, 4);
        if (holds != (p >= 1.0)) {
            ok = false;
            notes += fmt(" p=%g decided wrongly;", p);
        }
        if (p < 1.0) {
            if (!cx || !(cx->gap < -1e-6)) {
                ok = false;
                notes += fmt(" p=%g no witness;", p);
            } else {
                weakest_fail = std::max(weakest_fail, cx->gap);
            }
        } else if (cx) {
            ok = false;
            notes += fmt(" p=%g spurious witness gap %.3g;", p, cx->gap);
        }
    }
    for (auto [p, q] : {std::pair{2.0, 2.0}, {3.0, 1.5}, {4.0, 4.0 / 3.0}}) {
        const auto v = decide_hoelder_global({{-1, 0}, {p, 0}, {q, 0}});
        if (v.cls != GlobalClass::HoldsGlobal || v.evidence.find("reciprocal sum 0 <= 0") == std::string::npos) {
            ok = false;
            notes += fmt(" Hoelder (%g,%g) not decided with reciprocal sum 0;", p, q);
        }
        InequalityProblem pb(power(1, w), {power(p, w), power(q, w)}, PhiSpec::product(), box);
        if (auto cx = search_global(pb, 100000, 4)) {
            ok = false;
            notes += fmt(" Hoelder (%g,%g) spurious witness gap %.3g;", p, q, cx->gap);
        }
    }
    return {ok, "Minkowski p in {0.25..3} and Hoelder conjugates at budget 10^5" +
                    fmt(", weakest witness gap for p < 1: %.3g", weakest_fail) + notes};
}

// --- 5 -----------------------------------------------------------------------------------

Outcome criterion_local_trichotomy()
{
    std::mt19937_64 rng(505);
    std::uniform_real_distribution<double> par(-3, 3), stretch(1.5, 20);
    std::size_t contradictions = 0, necessary = 0, confirmed = 0, boundary_diff = 0;
    for (int it = 0; it < 1000; ++it) {
        const std::size_t n = 2 + it % 2;
        const auto w = random_weights(rng, n);
        Box box;
        for (int j = 0; j < 2; ++j) {
            const double lo = log_uniform(rng, 0.1, 2);
            box.emplace_back(lo, lo * stretch(rng));
        }
        std::vector<MeanSpec> inner{gini(par(rng), par(rng), w), gini(par(rng), par(rng), w)};
        InequalityProblem pb(gini(par(rng), par(rng), w), inner, PhiSpec::sum(), box);
        const auto closed = decide_minkowski_local(gini_gammas(pb, -1.0), box);
        const auto scan = local_scan(GammaSpec(pb), 9);
        if (contradicts(closed.cls, scan.cls)) ++contradictions;
        if (closed.cls != scan.cls) ++boundary_diff;
        if (closed.cls == LocalClass::NecessaryFails) {
            ++necessary;
            const auto& y = closed.witness->y;
            if (search_local(pb, y, 1e-2, 10000, it)) ++confirmed;
        }
    }
    const double rate = necessary ? double(confirmed) / double(necessary) : 1.0;
    return {contradictions == 0 && rate >= 0.95,
            fmt("10^3 tuples, %.0f contradictions, ", double(contradictions)) +
                fmt("%.0f of %.0f necessary failures confirmed by search", double(confirmed), double(necessary)) +
                fmt(" (%.1f%%), %.0f boundary differences", 100 * rate, double(boundary_diff))};
}

// --- 6 -----------------------------------------------------------------------------------

Outcome criterion_psi_equivalence()
{
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> par(-2, 2);
    const Box box{Interval::positive(), Interval::positive()};
    std::size_t mismatches = 0, banded = 0, points = 0;
    for (int problem = 0; problem < 50; ++problem) {
        const auto w = Weights::uniform(2);
        const PhiSpec phi = problem % 2 ? PhiSpec::sum() : PhiSpec::product();
        InequalityProblem pb(gini(par(rng), par(rng), w), {gini(par(rng), par(rng), w), gini(par(rng), par(rng), w)},
                             phi, box);
        GammaSpec spec(pb);
        const auto outer = to_bajraktarevic(pb.left);
        for (int i = 0; i < 20; ++i) {
            const std::vector<double> y{log_uniform(rng, 0.5, 2), log_uniform(rng, 0.5, 2)};
            ++points;
            const double t0 = pb.phi.value(y);
            const double dphi0 = outer.weight_total(t0) * outer.weight_total(t0) * outer.f.derivative(t0);
            Matrix s = build_psi_probe(spec, y);
            s *= dphi0 > 0 ? 1.0 : -1.0;  // sign-adjusted: Gamma PSD <=> s NSD
            const Matrix g = gamma_at(spec, y);
            const auto es = jacobi_eigen(s);
            const auto eg = jacobi_eigen(g);
            // compare on the Gamma scale: the congruence factor is |phi_0'| / (phi_i' phi_j')
            const double scale_s = std::max(std::abs(es.values.front()), std::abs(es.values.back()));
            const double scale_g = std::max(std::abs(eg.values.front()), std::abs(eg.values.back()));
            const bool nsd = es.values.back() <= 1e-6 * std::max(1.0, scale_s);
            const bool psd = eg.values.front() >= -1e-6 * std::max(1.0, scale_g);
            const bool near = std::abs(es.values.back()) <= 1e-6 * std::max(1.0, scale_s) * 10 ||
                              std::abs(eg.values.front()) <= 1e-6 * std::max(1.0, scale_g) * 10;
            if (nsd != psd) {
                if (near)
                    ++banded;
                else
                    ++mismatches;
            }
        }
    }
    return {mismatches == 0, fmt("%.0f points, %.0f mismatches, %.0f within the tolerance band", double(points),
                                 double(mismatches), double(banded))};
}

// --- 7 -----------------------------------------------------------------------------------

Outcome criterion_diagonal()
{
    std::mt19937_64 rng(707);
    std::uniform_real_distribution<double> par(-3, 3);
    const PhiSpec custom = PhiSpec::custom(
        [](std::span<const double> y) { return y[0] + y[1] * y[1] + y[0] * y[1]; },
        [](std::span<const double> y) { return std::vector<double>{1.0 + y[1], 2.0 * y[1] + y[0]}; },
        [](std::span<const double>) { return Matrix{{0.0, 1.0}, {1.0, 2.0}}; }, Interval::positive());
    const Box box{Interval(0.1, 10), Interval(0.1, 10)};
    double worst = 0.0;
    for (int it = 0; it < 1000; ++it) {
        const std::size_t n = 2 + it % 4;
        const auto w = random_weights(rng, n);
        const PhiSpec phi = it % 3 == 0 ? PhiSpec::sum() : it % 3 == 1 ? PhiSpec::product() : custom;
        InequalityProblem pb(gini(par(rng), par(rng), w), {gini(par(rng), par(rng), w), gini(par(rng), par(rng), w)},
                             phi, box);
        const std::vector<double> y{log_uniform(rng, 0.1, 10), log_uniform(rng, 0.1, 10)};
        worst = std::max(worst, std::abs(deficiency(pb, diagonal_point(n, y))));
    }
    return {worst <= 1e-10, fmt("10^3 diagonal points (sum, product, custom), max |F| = %.3g", worst)};
}

} // namespace

int main()
{
    struct Criterion {
        int id;
        const char* name;
        double limit_s;  // 0: no runtime bound
        Outcome (*run)();
    };
    const Criterion criteria[] = {
        {1, "mean-family reductions", 1.0, criterion_reductions},
        {2, "diagonal partial derivatives", 10.0, criterion_derivatives},
        {3, "shifted-diagonal PSD oracle", 30.0, criterion_psd_oracle},
        {4, "classical inequalities", 60.0, criterion_classical},
        {5, "local trichotomy agreement", 0.0, criterion_local_trichotomy},
        {6, "Psi-Hessian equivalence", 10.0, criterion_psi_equivalence},
        {7, "diagonal equality", 0.0, criterion_diagonal},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = c.limit_s == 0.0 || secs < c.limit_s;
        const bool pass = o.pass && in_time;
        failed += !pass;
        std::printf("criterion %d (%s): %s - %s; %.2f s%s\n", c.id, c.name, pass ? "PASS" : "FAIL", o.detail.c_str(),
                    secs, in_time ? "" : fmt(" exceeds %.0f s", c.limit_s).c_str());
        std::fflush(stdout);
    }
    std::printf("%d of 7 criteria passed\n", 7 - failed);
    return failed ? 1 : 0;
}
