#include <gtest/gtest.h>

#include <random>

#include "meanineq/global.hpp"
#include "meanineq/search.hpp"

using namespace meanineq;

namespace {

const Box kPositive2{Interval::positive(), Interval::positive()};

InequalityProblem gini_problem(const std::vector<GiniParams>& ps, PhiSpec phi, Box box, std::size_t n = 2)
{
    const auto w = Weights::uniform(n);
    std::vector<MeanSpec> inner;
    for (std::size_t i = 1; i < ps.size(); ++i) inner.push_back(gini(ps[i].r, ps[i].s, w));
    return InequalityProblem(gini(ps[0].r, ps[0].s, w), inner, std::move(phi), std::move(box));
}

InequalityProblem power_minkowski(double p, std::size_t n = 2)
{
    return gini_problem({{p, 0}, {p, 0}, {p, 0}}, PhiSpec::sum(), kPositive2, n);
}

// Product problem from parameters written with the outer mean as G_{-r0,-s0}.
InequalityProblem hoelder_problem(std::vector<GiniParams> ps, std::size_t n = 2)
{
    ps[0] = GiniParams(-ps[0].r, -ps[0].s);
    return gini_problem(ps, PhiSpec::product(), Box(ps.size() - 1, Interval::positive()), n);
}

std::vector<GiniParams> random_tuple(std::mt19937_64& rng, std::size_t k, double lo, double hi)
{
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<GiniParams> out;
    for (std::size_t i = 0; i <= k; ++i) out.emplace_back(u(rng), u(rng));
    return out;
}

void expect_sound(const InequalityProblem& pb, const Counterexample& w)
{
    EXPECT_LT(deficiency(pb, w.x), -kViolationTolerance);
    EXPECT_DOUBLE_EQ(w.gap, w.rhs - w.lhs);
    for (std::size_t l = 0; l < pb.n; ++l)
        for (std::size_t j = 0; j < pb.k; ++j) EXPECT_TRUE(pb.box[j].contains(w.x(l, j)));
}

} // namespace

TEST(Witness, HalfPowerHandInstance)
{
    const auto pb = power_minkowski(0.5);
    const auto w = validate_witness(pb, Matrix{{1, 0.01}, {0.01, 1}});
    ASSERT_TRUE(w);
    EXPECT_NEAR(w->lhs, 1.01, 1e-12);
    EXPECT_NEAR(w->rhs, 0.605, 1e-12);
    EXPECT_NEAR(w->gap, -0.405, 1e-12);
    EXPECT_NEAR(w->distance_to_diagonal, std::sqrt(4 * 0.495 * 0.495), 1e-12);
    EXPECT_FALSE(validate_witness(pb, Matrix{{1, 2}, {1, 2}}));
}

TEST(SearchLocal, FindsHalfPowerWitness)
{
    const auto pb = power_minkowski(0.5);
    const auto w = search_local(pb, std::vector<double>{1, 1}, 1e-2, 10000);
    ASSERT_TRUE(w);
    expect_sound(pb, *w);
    EXPECT_LT(w->distance_to_diagonal, 0.05);
}

TEST(SearchLocal, EmptyWhenInequalityHolds)
{
    const auto pb = power_minkowski(2.0);
    for (auto c : {std::vector<double>{1, 1}, {0.1, 5}, {30, 0.02}})
        EXPECT_FALSE(search_local(pb, c, 1e-1, 5000, 3));
    EXPECT_FALSE(search_local(power_minkowski(0.5), std::vector<double>{1, 1}, 1e-2, 0));
}

TEST(SearchLocal, Validation)
{
    const auto pb = power_minkowski(0.5);
    EXPECT_THROW(search_local(pb, std::vector<double>{1}, 1e-2, 10), shape_error);
    EXPECT_THROW(search_local(pb, std::vector<double>{-1, 1}, 1e-2, 10), domain_error);
    EXPECT_THROW(search_local(pb, std::vector<double>{1, 1}, 0.0, 10), domain_error);
}

TEST(SearchLocal, SecondOrderCompleteness)
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> y(0.2, 5);
    int tried = 0, found = 0;
    while (tried < 100) {
        const std::size_t n = 2 + tried % 3;
        const auto ps = random_tuple(rng, 2, -2, 3);
        const auto pb = gini_problem(ps, PhiSpec::sum(), kPositive2, n);
        const std::vector<double> c{y(rng), y(rng)};
        const auto g = gamma_at(GammaSpec(pb), c);
        const auto e = jacobi_eigen(g);
        if (!(e.values[0] < -0.1 * g.max_abs())) continue;
        ++tried;
        if (auto w = search_local(pb, c, 1e-2, 10000, tried)) {
            ++found;
            expect_sound(pb, *w);
        }
    }
    EXPECT_GE(found, 95);
}

TEST(SearchGlobal, FindsOuterThreeInnerTwo)
{
    const auto pb = gini_problem({{3, 0}, {2, 0}, {2, 0}}, PhiSpec::sum(), kPositive2);
    const auto w = search_global(pb, 20000, 1);
    ASSERT_TRUE(w);
    expect_sound(pb, *w);
}

TEST(SearchGlobal, HalfPowerWitnessAndDeterminism)
{
    const auto pb = power_minkowski(0.5);
    const auto a = search_global(pb, 5000, 42);
    const auto b = search_global(pb, 5000, 42);
    ASSERT_TRUE(a && b);
    EXPECT_EQ(a->x, b->x);
    EXPECT_EQ(a->gap, b->gap);
    EXPECT_LT(a->gap, -1e-6);
    EXPECT_FALSE(search_global(pb, 0, 42));
}

TEST(SearchGlobal, ClassicHoelderNoViolationAtOneMillion)
{
    const auto pb = hoelder_problem({{-1, 0}, {2, 0}, {2, 0}});
    EXPECT_FALSE(search_global(pb, 1000000, 7));
}

TEST(SearchGlobal, NoFalsePositivesOnHoldingTuples)
{
    std::mt19937_64 rng(22);
    int mink = 0, hoel = 0;
    while (mink + hoel < 100) {
        const auto ps = random_tuple(rng, 2, -2, 4);
        const std::size_t n = 2 + (mink + hoel) % 3;
        if (mink < 50 && decide_minkowski_global(ps).cls == GlobalClass::HoldsGlobal) {
            ++mink;
            const auto pb = gini_problem(ps, PhiSpec::sum(), kPositive2, n);
            const auto w = search_global(pb, 100000, mink);
            ASSERT_FALSE(w) << ps[0].r << "," << ps[0].s << " gap " << w->gap;
        } else if (hoel < 50 && decide_hoelder_global(ps).cls == GlobalClass::HoldsGlobal) {
            ++hoel;
            const auto pb = hoelder_problem(ps, n);
            const auto w = search_global(pb, 100000, hoel);
            ASSERT_FALSE(w) << ps[0].r << "," << ps[0].s << " gap " << w->gap;
        }
    }
}

TEST(SearchOverN, FailingTuplesGetWitnesses)
{
    const std::vector<GiniParams> ps{{3, 0}, {2, 0}, {2, 0}};
    const auto w = search_over_n([&](std::size_t n) { return gini_problem(ps, PhiSpec::sum(), kPositive2, n); },
                                 20000, 5);
    ASSERT_TRUE(w);
    const std::vector<GiniParams> hp{{-1, 0}, {1.5, 0}, {1.5, 0}};
    const auto h = search_over_n([&](std::size_t n) { return hoelder_problem(hp, n); }, 20000, 5);
    ASSERT_TRUE(h);
    expect_sound(hoelder_problem(hp, h->x.rows()), *h);
}

TEST(Shrink, MovesTowardDiagonalAndKeepsViolation)
{
    const auto pb = power_minkowski(0.5);
    const auto w = *validate_witness(pb, Matrix{{1, 0.01}, {0.01, 1}});
    const auto s = shrink(pb, w);
    EXPECT_LE(s.distance_to_diagonal, w.distance_to_diagonal);
    EXPECT_LT(s.distance_to_diagonal, w.distance_to_diagonal);
    expect_sound(pb, s);
    const auto again = shrink(pb, s);
    EXPECT_EQ(again.x, s.x);
}

TEST(Shrink, RejectsNonViolatingInput)
{
    const auto pb = power_minkowski(0.5);
    Counterexample fake{Matrix{{1, 1}, {1, 1}}, 1, 1, -1, 0};
    EXPECT_THROW(shrink(pb, fake), contract_error);
}

TEST(Shrink, FoundWitnessesShrink)
{
    const auto pb = gini_problem({{3, 0}, {2, 0}, {2, 0}}, PhiSpec::sum(), kPositive2);
    const auto w = search_global(pb, 20000, 9);
    ASSERT_TRUE(w);
    const auto s = shrink(pb, *w);
    EXPECT_LE(s.distance_to_diagonal, w->distance_to_diagonal);
    expect_sound(pb, s);
}
