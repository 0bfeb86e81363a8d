#pragma once

// Reduced-scale invariant suites behind `meanineq selftest`.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "meanineq/diagcalc.hpp"
#include "meanineq/global.hpp"
#include "meanineq/local.hpp"
#include "meanineq/psd.hpp"

namespace meanineq {

struct SuiteResult {
    std::string name;
    std::size_t passed = 0;
    std::size_t total = 0;
};

struct SelftestOptions {
    std::uint64_t seed = 1;
    bool inject_fault = false;  // perturbs the analytic side of two suites so they must fail
};

namespace detail {

inline Weights random_weights(std::mt19937_64& rng, std::size_t n)
{
    std::uniform_real_distribution<double> u(0.1, 1.0);
    std::vector<double> w(n);
    for (double& v : w) v = u(rng);
    return Weights(w);
}

inline SuiteResult suite_reductions(std::mt19937_64& rng)
{
    SuiteResult res{"reductions"};
    std::uniform_real_distribution<double> r(-5, 5), lx(std::log(1e-3), std::log(1e3));
    for (int it = 0; it < 1000; ++it) {
        const std::size_t n = 2 + it % 5;
        const auto w = random_weights(rng, n);
        std::vector<double> x(n);
        for (double& v : x) v = std::exp(lx(rng));
        const double p = r(rng);
        const double a = gini_mean({p, 0.0}, w, x), b = power_mean(p, w, x);
        ++res.total;
        res.passed += std::abs(a - b) <= 1e-12 * std::abs(b);
    }
    return res;
}

inline SuiteResult suite_derivatives(std::mt19937_64& rng, bool fault)
{
    SuiteResult res{"derivatives"};
    std::uniform_real_distribution<double> r(-3, 3), lt(std::log(0.1), std::log(10.0));
    for (int it = 0; it < 50; ++it) {
        const std::size_t n = 2 + it % 3;
        const auto m = gini(r(rng), r(rng), random_weights(rng, n));
        const double t = std::exp(lt(rng));
        auto first = diag_first_partials(m, t);
        auto second = diag_second_partials(m, t);
        if (fault) {
            for (double& v : first) v *= 1.001;
            second *= 1.001;
        }
        auto at = [&](std::initializer_list<std::pair<std::size_t, double>> moves) {
            std::vector<double> x(n, t);
            for (auto [i, d] : moves) x[i] += d;
            return evaluate(m, x);
        };
        const double h1 = 1e-5 * t, h2 = 1e-4 * t;
        double dev1 = 0.0, scale1 = 1.0, dev2 = 0.0, scale2 = std::max(1.0, second.max_abs());
        for (std::size_t a = 0; a < n; ++a) {
            dev1 = std::max(dev1, std::abs((at({{a, h1}}) - at({{a, -h1}})) / (2 * h1) - first[a]));
            scale1 = std::max(scale1, std::abs(first[a]));
            for (std::size_t b = 0; b < n; ++b) {
                const double fd = a == b ? (at({{a, h2}}) - 2 * at({}) + at({{a, -h2}})) / (h2 * h2)
                                         : (at({{a, h2}, {b, h2}}) - at({{a, h2}, {b, -h2}}) -
                                            at({{a, -h2}, {b, h2}}) + at({{a, -h2}, {b, -h2}})) /
                                               (4 * h2 * h2);
                dev2 = std::max(dev2, std::abs(fd - second(a, b)));
            }
        }
        ++res.total;
        res.passed += dev1 / scale1 <= 1e-5 && dev2 / scale2 <= 1e-5;
    }
    return res;
}

inline SuiteResult suite_psd(std::mt19937_64& rng)
{
    SuiteResult res{"psd-oracle"};
    std::uniform_real_distribution<double> u(-5, 5);
    for (int it = 0; it < 2000; ++it) {
        const std::size_t k = 2 + it % 7;
        std::vector<double> c(k);
        for (double& v : c) v = u(rng);
        ShiftedDiagonal m(u(rng), c);
        ++res.total;
        res.passed += is_psd(classify_shifted_diagonal(m).cls) == is_psd(classify_symmetric(m.matrix(), 1e-9).cls);
    }
    return res;
}

inline SuiteResult suite_consistency(std::mt19937_64& rng)
{
    SuiteResult res{"global-local-consistency"};
    std::uniform_real_distribution<double> u(-3, 4);
    const Box box{Interval::positive(), Interval::positive()};
    for (int it = 0; it < 1000; ++it) {
        std::vector<GiniParams> ps;
        std::vector<double> mink, hoel;
        for (int i = 0; i < 3; ++i) {
            ps.emplace_back(u(rng), u(rng));
            mink.push_back(ps.back().sum() - 1.0);
            hoel.push_back(ps.back().sum());
        }
        ++res.total;
        bool ok = true;
        if (decide_minkowski_global(ps).cls == GlobalClass::HoldsGlobal)
            ok &= decide_minkowski_local(mink, box).cls != LocalClass::NecessaryFails;
        if (decide_hoelder_global(ps).cls == GlobalClass::HoldsGlobal)
            ok &= decide_hoelder_local(hoel).cls != LocalClass::NecessaryFails;
        res.passed += ok;
    }
    return res;
}

inline SuiteResult suite_diagonal(std::mt19937_64& rng, bool fault)
{
    SuiteResult res{"diagonal-equality"};
    std::uniform_real_distribution<double> r(-3, 3), ly(std::log(0.1), std::log(10.0));
    for (int it = 0; it < 300; ++it) {
        const std::size_t n = 2 + it % 3;
        const auto w = random_weights(rng, n);
        const bool product = it % 2 == 1;
        InequalityProblem pb(gini(r(rng), r(rng), w), {gini(r(rng), r(rng), w), gini(r(rng), r(rng), w)},
                             product ? PhiSpec::product() : PhiSpec::sum(), {Interval::positive(), Interval::positive()});
        const std::vector<double> y{std::exp(ly(rng)), std::exp(ly(rng))};
        const double f = deficiency(pb, diagonal_point(n, y)) + (fault ? 1e-6 : 0.0);
        ++res.total;
        res.passed += std::abs(f) <= 1e-10;
    }
    return res;
}

} // namespace detail

inline std::vector<SuiteResult> run_selftest(const SelftestOptions& opt)
{
    std::mt19937_64 rng(opt.seed);
    std::vector<SuiteResult> out;
    out.push_back(detail::suite_reductions(rng));
    out.push_back(detail::suite_derivatives(rng, opt.inject_fault));
    out.push_back(detail::suite_psd(rng));
    out.push_back(detail::suite_consistency(rng));
    out.push_back(detail::suite_diagonal(rng, opt.inject_fault));
    return out;
}

} // namespace meanineq
