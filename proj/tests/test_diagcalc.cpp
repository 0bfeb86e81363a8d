#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "meanineq/diagcalc.hpp"

using namespace meanineq;

namespace {

// A nonsymmetric Bajraktarevic spec on (0.5, 3): f = exp, p_1 = 1 + t, p_2 = 2 + sin t, p_3 = t^2.
BajraktarevicSpec custom_spec()
{
    GeneratorMap f{[](double t) { return std::exp(t); }, [](double t) { return std::exp(t); },
                   [](double t) { return std::exp(t); }, [](double v) { return std::log(v); }};
    std::vector<WeightMap> p{
        {[](double t) { return 1.0 + t; }, [](double) { return 1.0; }},
        {[](double t) { return 2.0 + std::sin(t); }, [](double t) { return std::cos(t); }},
        {[](double t) { return t * t; }, [](double t) { return 2.0 * t; }},
    };
    return make_bajraktarevic(f, p, Interval(0.5, 3.0));
}

double fd_first(const BajraktarevicSpec& spec, double t, std::size_t l, double h)
{
    std::vector<double> a(spec.arity(), t), b(spec.arity(), t);
    a[l] += h;
    b[l] -= h;
    return (bajraktarevic_mean(spec, a) - bajraktarevic_mean(spec, b)) / (2 * h);
}

double fd_second(const BajraktarevicSpec& spec, double t, std::size_t l, std::size_t m, double h)
{
    auto at = [&](double dl, double dm) {
        std::vector<double> x(spec.arity(), t);
        x[l] += dl;
        x[m] += dm;
        return bajraktarevic_mean(spec, x);
    };
    if (l == m) return (at(h, 0) - 2 * at(0, 0) + at(-h, 0)) / (h * h);
    return (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4 * h * h);
}

InequalityProblem power_minkowski(double p, std::size_t n = 2)
{
    const auto w = Weights::uniform(n);
    return InequalityProblem(power(p, w), {power(p, w), power(p, w)}, PhiSpec::sum(),
                             {Interval::positive(), Interval::positive()});
}

PhiSpec custom_phi()
{
    // Phi(y) = y_1 + y_2^2 + y_1 y_2 on positive boxes
    return PhiSpec::custom(
        [](std::span<const double> y) { return y[0] + y[1] * y[1] + y[0] * y[1]; },
        [](std::span<const double> y) { return std::vector<double>{1.0 + y[1], 2.0 * y[1] + y[0]}; },
        [](std::span<const double>) { return Matrix{{0.0, 1.0}, {1.0, 2.0}}; }, Interval::positive());
}

} // namespace

TEST(DiagFirstPartials, GiniWeightsAndNormalization)
{
    const MeanSpec g = gini(2.5, -1.0, Weights({0.3, 0.7}));
    for (double t : {0.1, 1.0, 7.0}) {
        const auto d = diag_first_partials(to_bajraktarevic(g), t);
        EXPECT_NEAR(d[0], 0.3, 1e-14);
        EXPECT_NEAR(d[1], 0.7, 1e-14);
    }
    const auto spec = custom_spec();
    for (double t : {0.6, 1.3, 2.9}) {
        const auto d = diag_first_partials(spec, t);
        EXPECT_NEAR(d[0] + d[1] + d[2], 1.0, 1e-12);
    }
    EXPECT_THROW(diag_first_partials(spec, 3.5), domain_error);
}

TEST(DiagFirstPartials, ConstantEqualWeightsAreSymmetric)
{
    GeneratorMap f{[](double t) { return t * t * t; }, [](double t) { return 3 * t * t; }, {},
                   [](double v) { return std::cbrt(v); }};
    WeightMap c{[](double) { return 4.0; }, {}};
    const auto spec = make_bajraktarevic(f, {c, c}, Interval(1, 2));
    const auto d = diag_first_partials(spec, 1.5);
    EXPECT_DOUBLE_EQ(d[0], 0.5);
    EXPECT_DOUBLE_EQ(d[1], 0.5);
}

TEST(DiagFirstPartials, MatchFiniteDifferencesForCustomSpec)
{
    const auto spec = custom_spec();
    const auto d = diag_first_partials(spec, 1.3);
    for (std::size_t l = 0; l < 3; ++l) EXPECT_NEAR(d[l], fd_first(spec, 1.3, l, 1e-5), 1e-6 * std::abs(d[l]));
}

TEST(DiagSecondPartials, GiniClosedForm)
{
    // r + s = 3, uniform weights, t = 1: diagonal 0.5, off-diagonal -0.5
    const auto h = diag_second_partials(gini(2, 1, Weights::uniform(2)), 1.0);
    EXPECT_NEAR(h(0, 0), 0.5, 1e-12);
    EXPECT_NEAR(h(1, 1), 0.5, 1e-12);
    EXPECT_NEAR(h(0, 1), -0.5, 1e-12);

    // r + s = 1 gives the zero matrix
    const auto z = diag_second_partials(gini(3, -2, Weights({0.2, 0.5, 0.3})), 2.3);
    EXPECT_LT(z.max_abs(), 1e-12);
}

TEST(DiagSecondPartials, GiniEntrywiseAgainstLambdaFormula)
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> par(-4, 4), lam(0.1, 1), ts(0.05, 20);
    for (int it = 0; it < 300; ++it) {
        const std::size_t n = 2 + it % 4;
        std::vector<double> raw(n);
        for (double& v : raw) v = lam(rng);
        const Weights w(raw);
        double r = par(rng), s = par(rng);
        if (it % 9 == 0) s = r;
        const double t = ts(rng);
        const auto h = diag_second_partials(gini(r, s, w), t);
        for (std::size_t l = 0; l < n; ++l) {
            double row = 0.0;
            for (std::size_t m = 0; m < n; ++m) {
                const double expect = w[m] * ((l == m ? 1.0 : 0.0) - w[l]) * (r + s - 1) / t;
                ASSERT_NEAR(h(l, m), expect, 1e-10 * std::max(std::abs(expect), std::abs((r + s - 1) / t)));
                ASSERT_NEAR(h(l, m), h(m, l), 1e-12 * std::max(1.0, std::abs(h(l, m))));
                row += h(l, m);
            }
            ASSERT_NEAR(row, 0.0, 1e-10 * std::max(1.0, std::abs((r + s - 1) / t)));
        }
    }
}

TEST(DiagSecondPartials, CustomSpecMatchesFiniteDifferences)
{
    const auto spec = custom_spec();
    for (double t : {0.8, 1.3, 2.4}) {
        const auto h = diag_second_partials(spec, t);
        for (std::size_t l = 0; l < 3; ++l)
            for (std::size_t m = 0; m < 3; ++m)
                EXPECT_NEAR(h(l, m), fd_second(spec, t, l, m, 1e-4), 1e-5 * std::max(1.0, h.max_abs()));
    }
}

TEST(DiagSecondPartials, MissingDerivativesAreCapabilityErrors)
{
    GeneratorMap f{[](double t) { return t; }, [](double) { return 1.0; }, {}, [](double v) { return v; }};
    WeightMap one{[](double) { return 1.0; }, {}};
    const auto spec = make_bajraktarevic(f, {one, one}, Interval(0, 1));
    EXPECT_THROW(diag_second_partials(spec, 0.5), capability_error);
}

TEST(WeightProportionality, Examples)
{
    const auto g = weight_proportionality_check(to_bajraktarevic(gini(1, 2, Weights({0.2, 0.8}))), 16);
    ASSERT_TRUE(g);
    EXPECT_NEAR((*g)[0], 0.2, 1e-12);

    GeneratorMap id{[](double t) { return t; }, [](double) { return 1.0; }, {}, [](double v) { return v; }};
    const auto lin = make_bajraktarevic(id, {{[](double t) { return t; }, {}}, {[](double) { return 1.0; }, {}}},
                                        Interval(1, 2));
    EXPECT_FALSE(weight_proportionality_check(lin, 16));

    const auto ex = make_bajraktarevic(
        id, {{[](double t) { return 2 * std::exp(t); }, {}}, {[](double t) { return 3 * std::exp(t); }, {}}},
        Interval(-1, 1));
    const auto e = weight_proportionality_check(ex, 16);
    ASSERT_TRUE(e);
    EXPECT_NEAR((*e)[0], 0.4, 1e-12);
    EXPECT_NEAR((*e)[1], 0.6, 1e-12);
    EXPECT_THROW(weight_proportionality_check(ex, 1), domain_error);
}

TEST(Problem, Validation)
{
    const auto w = Weights::uniform(2);
    EXPECT_THROW(InequalityProblem(power(1, w), {power(1, w)}, PhiSpec::sum(), {Interval::positive()}), shape_error);
    EXPECT_THROW(InequalityProblem(power(1, w), {power(1, w), power(1, Weights::uniform(3))}, PhiSpec::sum(),
                                   {Interval::positive(), Interval::positive()}),
                 shape_error);
    EXPECT_THROW(InequalityProblem(power(1, w), {power(1, w), power(1, w)}, PhiSpec::sum(),
                                   {Interval(-1, 1), Interval::positive()}),
                 domain_error);
    // Phi(box) must sit inside the outer domain: y1 - y2 can be negative
    auto diff = PhiSpec::custom([](std::span<const double> y) { return y[0] - y[1]; },
                                [](std::span<const double>) { return std::vector<double>{1.0, -1.0}; },
                                [](std::span<const double>) { return Matrix(2, 2); }, Interval::real_line());
    EXPECT_THROW(InequalityProblem(power(1, w), {power(1, w), power(1, w)}, diff,
                                   {Interval::positive(), Interval::positive()}),
                 domain_error);
    auto flat = PhiSpec::custom([](std::span<const double> y) { return y[0] * y[0] + y[1]; },
                                [](std::span<const double> y) { return std::vector<double>{2 * (y[0] - 1), 1.0}; },
                                [](std::span<const double>) { return Matrix{{2, 0}, {0, 0}}; }, Interval::positive());
    EXPECT_THROW(InequalityProblem(power(1, w), {power(1, w), power(1, w)}, flat,
                                   {Interval(0.5, 1.5), Interval::positive()}),
                 domain_error);
}

TEST(Deficiency, ZeroOnDiagonalForEveryPhiKind)
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> par(-3, 3), ly(std::log(0.05), std::log(20.0));
    const Box box{Interval::positive(), Interval::positive()};
    for (int it = 0; it < 600; ++it) {
        const auto w = Weights::uniform(3);
        PhiSpec phi = it % 3 == 0 ? PhiSpec::sum() : it % 3 == 1 ? PhiSpec::product() : custom_phi();
        InequalityProblem pb(gini(par(rng), par(rng), w), {gini(par(rng), par(rng), w), gini(par(rng), par(rng), w)},
                             phi, box);
        const std::vector<double> y{std::exp(ly(rng)), std::exp(ly(rng))};
        ASSERT_NEAR(deficiency(pb, diagonal_point(3, y)), 0.0, 1e-10);
    }
}

TEST(Deficiency, CauchySchwarzInstance)
{
    const auto w = Weights::uniform(2);
    InequalityProblem pb(power(1, w), {power(2, w), power(2, w)}, PhiSpec::product(),
                         {Interval::positive(), Interval::positive()});
    const Matrix x{{1, 2}, {2, 1}};
    EXPECT_NEAR(deficiency(pb, x), 0.5, 1e-14);
    const Matrix outside{{1, 2}, {0, 1}};
    EXPECT_THROW(deficiency(pb, outside), domain_error);
}

TEST(Deficiency, HalfPowerMinkowskiViolation)
{
    const auto pb = power_minkowski(0.5);
    const Matrix x{{1, 0.01}, {0.01, 1}};
    const auto sides = evaluate_sides(pb, x);
    EXPECT_NEAR(sides.lhs, 1.01, 1e-13);
    EXPECT_NEAR(sides.rhs, 0.605, 1e-13);
    EXPECT_LT(deficiency(pb, x), -0.4);
}

TEST(DeficiencyDerivatives, AllArithmeticGivesZeroHessian)
{
    const auto pb = power_minkowski(1.0);
    const std::vector<double> y{0.7, 2.2};
    EXPECT_LT(deficiency_second_partials(pb, y).max_abs(), 1e-14);
    for (double v : deficiency_first_partials(pb, y)) EXPECT_NEAR(v, 0.0, 1e-15);
}

TEST(DeficiencyDerivatives, FirstPartialsVanishForEqualWeights)
{
    const auto w = Weights({0.25, 0.75});
    InequalityProblem pb(gini(3, 1, w), {gini(0.5, 2, w), gini(-1, 4, w)}, PhiSpec::product(),
                         {Interval::positive(), Interval::positive()});
    for (double v : deficiency_first_partials(pb, std::vector<double>{1.7, 0.4})) EXPECT_NEAR(v, 0.0, 1e-14);
}

TEST(DeficiencyDerivatives, AnalyticMatchesFiniteDifferences)
{
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> par(-2.5, 2.5), ly(std::log(0.3), std::log(3.0));
    const Box box{Interval::positive(), Interval::positive()};
    for (int problem = 0; problem < 12; ++problem) {
        const auto w = Weights({0.3, 0.7});
        PhiSpec phi = problem % 3 == 0 ? PhiSpec::sum() : problem % 3 == 1 ? PhiSpec::product() : custom_phi();
        InequalityProblem pb(gini(par(rng), par(rng), w), {gini(par(rng), par(rng), w), gini(par(rng), par(rng), w)},
                             phi, box);
        for (int point = 0; point < 100; ++point) {
            const std::vector<double> y{std::exp(ly(rng)), std::exp(ly(rng))};
            const auto rep = deficiency_gradient_check(pb, y);
            ASSERT_LE(rep.max_rel_deviation, 1e-5) << describe(pb.left) << " at " << y[0] << "," << y[1];
            ASSERT_EQ(rep.assumptions.empty(), phi.kind() != PhiKind::Custom);
        }
    }
}

TEST(DeficiencyDerivatives, NonproportionalCustomWeights)
{
    // The diagonal-partial formulas must also hold when p_l are not proportional (first partials nonzero).
    const auto spec = custom_spec();
    GeneratorMap id{[](double t) { return t; }, [](double) { return 1.0; }, [](double) { return 0.0; },
                    [](double v) { return v; }};
    WeightMap one{[](double) { return 1.0; }, [](double) { return 0.0; }};
    const auto arith = make_bajraktarevic(id, {one, one, one}, Interval::positive());
    InequalityProblem pb(arith, {spec, spec}, PhiSpec::sum(), {Interval(0.5, 3), Interval(0.5, 3)});
    const std::vector<double> y{1.1, 2.0};
    const auto rep = deficiency_gradient_check(pb, y);
    EXPECT_LE(rep.max_rel_deviation, 1e-5);
    double largest = 0.0;
    for (double v : rep.first_analytic) largest = std::max(largest, std::abs(v));
    EXPECT_GT(largest, 1e-3);
}
