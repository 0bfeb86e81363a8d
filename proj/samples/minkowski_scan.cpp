// Sweeps the exponent of the power-mean Minkowski inequality and prints, for each p,
// the local and global verdicts and the gap of a counterexample when one exists.

#include <cstdio>

#include "meanineq/global.hpp"
#include "meanineq/local.hpp"
#include "meanineq/search.hpp"

using namespace meanineq;

int main()
{
    const Box box{Interval::positive(), Interval::positive()};
    std::printf("%6s  %-16s  %-14s  %s\n", "p", "local", "global", "witness gap");
    for (double p : {-1.0, 0.0, 0.25, 0.5, 0.99, 1.0, 1.5, 2.0, 3.0}) {
        const auto w = Weights::uniform(2);
        InequalityProblem pb(power(p, w), {power(p, w), power(p, w)}, PhiSpec::sum(), box);
        const auto local = closed_form_local(pb);
        const auto global = decide_minkowski_global({{p, 0}, {p, 0}, {p, 0}});
        const auto cx = search_global(pb, 20000, 1);
        std::printf("%6.2f  %-16s  %-14s  ", p, to_string(local->cls), to_string(global.cls));
        if (cx)
            std::printf("%.3g\n", cx->gap);
        else
            std::printf("-\n");
    }
}
