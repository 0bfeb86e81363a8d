#pragma once

// The analyze pipeline: weight proportionality -> local decision -> global deciders and
// grid checkers -> counterexample search -> Report.

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "meanineq/config.hpp"
#include "meanineq/diagcalc.hpp"
#include "meanineq/global.hpp"
#include "meanineq/local.hpp"
#include "meanineq/report.hpp"
#include "meanineq/search.hpp"

namespace meanineq {

namespace detail {

inline std::vector<GiniParams> gini_params(const InequalityProblem& pb)
{
    std::vector<GiniParams> ps{as_gini(pb.left)->params};
    for (const auto& m : pb.right) ps.push_back(as_gini(m)->params);
    return ps;
}

inline bool full_positive(const Box& box)
{
    for (const auto& iv : box)
        if (!(iv == Interval::positive())) return false;
    return true;
}

inline std::vector<double> box_center(const Box& box)
{
    std::vector<double> y;
    for (const auto& iv : box) y.push_back(axis_samples(iv, 1, {0.0, 1e3, true, false})[0]);
    return y;
}

inline ReportCheck as_check(const std::string& name, const GlobalVerdict& v)
{
    std::string ev = v.evidence;
    if (v.probe) {
        ev += "; probe";
        if (!v.probe->a.empty()) ev += " a = (" + num_list(v.probe->a, 6) + ")";
        ev += " b = (" + num_list(v.probe->b, 6) + ") lhs " + num(v.probe->lhs, 6) + " > rhs " + num(v.probe->rhs, 6);
    }
    return {name, to_string(v.cls), ev};
}

// Largest k for which the grid checkers run inside analyze.
inline constexpr std::size_t kCheckerMaxK = 3;

} // namespace detail

inline Report analyze(const ProblemConfig& cfg)
{
    const auto start = std::chrono::steady_clock::now();
    const InequalityProblem pb = build_problem(cfg);
    Report r;
    r.config = format_config(cfg);

    // local
    const auto lambda = common_weights(pb);
    r.weights_proportional = lambda.has_value();
    std::optional<LocalClass> local;
    if (!lambda) {
        local = LocalClass::NecessaryFails;
        r.local_method = "weight-proportionality";
        r.local_summary = "weights are not proportional to a common lambda; the first diagonal derivatives of the "
                          "deficiency do not all vanish";
    } else {
        std::optional<LocalVerdict> v;
        if (cfg.local == "auto") v = closed_form_local(pb);
        if (v) {
            r.local_method = pb.phi.kind() == PhiKind::Sum ? "closed-form-minkowski" : "closed-form-hoelder";
        } else {
            v = local_scan(GammaSpec(pb), cfg.grid);
            r.local_method = "gamma-scan";
            if (v->closed_form)
                v->summary += std::string("; closed form says ") + to_string(*v->closed_form) +
                              (*v->closed_form_agrees ? " (consistent)" : " (contradiction)");
        }
        local = v->cls;
        r.local_summary = v->summary;
        if (v->witness && v->cls != LocalClass::SufficientHolds) r.local_witness_y = v->witness->y;
    }
    r.local_class = to_string(*local);

    // global
    GlobalVerdict global;
    bool conclusive_fail = false;  // a characterization says the inequality fails in this exact setting
    const bool uniform = uniform_weights(cfg);
    if (pb.all_gini() && uniform && pb.phi.kind() == PhiKind::Sum) {
        const auto ps = detail::gini_params(pb);
        const auto cp = decide_minkowski_2var(ps);
        const auto pal = decide_minkowski_global(ps);
        const auto& primary = cfg.n == 2 ? cp : pal;
        r.global_method = cfg.n == 2 ? "two-variable-characterization" : "all-n-characterization";
        r.checks.push_back(detail::as_check(cfg.n == 2 ? "all-n-characterization" : "two-variable-characterization",
                                            cfg.n == 2 ? pal : cp));
        global = primary;
        conclusive_fail = cfg.n == 2 && cp.cls == GlobalClass::FailsGlobal && detail::full_positive(pb.box);
        if (pb.k <= detail::kCheckerMaxK) r.checks.push_back(detail::as_check("chi-form-minkowski", check_gsc0_minkowski(ps)));
    } else if (pb.all_gini() && uniform && pb.phi.kind() == PhiKind::Product) {
        auto ps = detail::gini_params(pb);
        ps[0] = GiniParams(-ps[0].r, -ps[0].s);
        global = decide_hoelder_global(ps);
        r.global_method = "all-n-hoelder-characterization";
        if (pb.k <= detail::kCheckerMaxK) {
            Box ratios;
            for (const auto& iv : pb.box) ratios.push_back(ratio_interval(iv));
            r.checks.push_back(detail::as_check("chi-form-hoelder", check_gsc0_hoelder(ps, ratios)));
        }
    } else {
        r.global_method = "pointwise-grid-condition";
        global.cls = GlobalClass::Inconclusive;
        global.evidence = "no characterization applies (weights are not uniform)";
    }
    if (pb.k <= detail::kCheckerMaxK) {
        const auto g = check_gsc0(pb, cfg.grid);
        if (r.global_method == "pointwise-grid-condition") {
            global = g;
        } else {
            r.checks.push_back(detail::as_check("pointwise-grid-condition", g));
        }
    }
    if (global.cls == GlobalClass::FailsGlobal && !conclusive_fail) {
        // the characterization is about all n on (0,inf)^k; failure in this setting needs a witness
        global.cls = GlobalClass::Inconclusive;
        global.evidence += "; the characterization covers all n on (0,inf)^k, so failure here needs a witness";
    }

    // counterexample search
    std::optional<Counterexample> w;
    std::string origin;
    if (*local == LocalClass::NecessaryFails || global.cls != GlobalClass::HoldsGlobal) {
        if (*local == LocalClass::NecessaryFails) {
            // the violation is absolute, so keep the center away from tiny or huge scales
            auto moderate = [&](const std::vector<double>& y) {
                if (!box_contains(pb.box, y)) return false;
                for (double v : y)
                    if (std::abs(v) < 1e-2 || std::abs(v) > 1e2) return false;
                return true;
            };
            const std::vector<double> center =
                r.local_witness_y && moderate(*r.local_witness_y) ? *r.local_witness_y : detail::box_center(pb.box);
            w = search_local(pb, center, 1e-2, std::min<std::size_t>(cfg.budget, 10000), cfg.seed);
            origin = "local-search";
        }
        if (!w) {
            w = search_global(pb, cfg.budget, cfg.seed);
            origin = "global-search";
        }
        if (w) w = shrink(pb, *w);
    }
    if (w) {
        if (global.cls == GlobalClass::HoldsGlobal)
            global.evidence += "; contradicted by a counterexample";
        else
            global.evidence += "; counterexample found at n = " + std::to_string(pb.n);
        global.cls = GlobalClass::FailsGlobal;
        r.witness = ReportWitness{origin, w->x, w->lhs, w->rhs, w->gap, w->distance_to_diagonal};
    } else if (global.cls == GlobalClass::FailsGlobal) {
        global.evidence += "; no counterexample found within budget " + std::to_string(cfg.budget);
    }
    r.global_class = to_string(global.cls);
    r.global_evidence = global.evidence;
    if (global.probe && r.global_method == "pointwise-grid-condition")
        r.global_evidence = detail::as_check("", global).evidence;

    // derivative check at three diagonal points of moderate size
    for (std::size_t i = 0; i < 3; ++i) {
        std::vector<double> y;
        for (const auto& iv : pb.box) y.push_back(axis_samples(iv, 3, {0.25, 10.0, true, false})[i]);
        const auto d = deficiency_gradient_check(pb, y);
        r.derivative_max_abs = std::max(r.derivative_max_abs, d.max_abs_deviation);
        r.derivative_max_rel = std::max(r.derivative_max_rel, d.max_rel_deviation);
        ++r.derivative_points;
    }

    if (r.witness) {
        r.verdict = "fails";
        r.exit_status = 1;
    } else if (global.cls == GlobalClass::HoldsGlobal) {
        r.verdict = "holds";
        r.exit_status = 0;
    } else {
        r.verdict = "inconclusive";
        r.exit_status = 2;
    }
    r.total_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return r;
}

} // namespace meanineq
