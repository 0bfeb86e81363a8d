// meanineq: evaluate means, analyze mean inequalities, run the self-test suites.
//
// Exit status: 0 holds / success, 1 fails with a witness, 2 inconclusive,
// 64 usage or configuration error, 65 evaluation domain error.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "meanineq/analyze.hpp"
#include "meanineq/config.hpp"
#include "meanineq/report.hpp"
#include "meanineq/selftest.hpp"

using namespace meanineq;

namespace {

constexpr int kExitUsage = 64;
constexpr int kExitData = 65;

ProblemConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw config_error("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::map<std::string, std::string> parse_assignments(const std::vector<std::string>& args)
{
    std::map<std::string, std::string> out;
    for (const auto& a : args) {
        const auto eq = a.find('=');
        if (eq == std::string::npos || eq == 0) throw config_error("expected key=value, got '" + a + "'");
        out[a.substr(0, eq)] = a.substr(eq + 1);
    }
    return out;
}

std::string need(const std::map<std::string, std::string>& kv, const std::string& key)
{
    auto it = kv.find(key);
    if (it == kv.end()) throw config_error("missing argument '" + key + "='");
    return it->second;
}

void only(const std::map<std::string, std::string>& kv, std::initializer_list<const char*> allowed)
{
    for (const auto& [k, v] : kv) {
        bool ok = false;
        for (const char* a : allowed) ok |= k == a;
        if (!ok) throw config_error("unknown argument '" + k + "='");
    }
}

double real_arg(const std::map<std::string, std::string>& kv, const std::string& key)
{
    return detail::parse_real(need(kv, key), key);
}

std::vector<double> list_arg(const std::map<std::string, std::string>& kv, const std::string& key)
{
    return detail::parse_list(need(kv, key), key);
}

Weights weights_arg(const std::map<std::string, std::string>& kv, std::size_t n)
{
    if (!kv.count("w")) return Weights::uniform(n);
    Weights w(list_arg(kv, "w"));
    if (w.size() != n) throw shape_error("weight list length differs from x");
    return w;
}

int cmd_eval(const std::string& what, const std::vector<std::string>& args, const std::string& config_path,
             int digits)
{
    const auto kv = parse_assignments(args);
    auto print = [&](double v) { std::printf("%s\n", detail::num(v, digits).c_str()); };
    if (what == "gini" || what == "power") {
        if (what == "gini")
            only(kv, {"r", "s", "w", "x"});
        else
            only(kv, {"p", "w", "x"});
        const auto x = list_arg(kv, "x");
        const auto w = weights_arg(kv, x.size());
        print(what == "gini" ? gini_mean({real_arg(kv, "r"), real_arg(kv, "s")}, w, x)
                             : power_mean(real_arg(kv, "p"), w, x));
        return 0;
    }
    if (what == "chi") {
        only(kv, {"r", "s", "t"});
        const double t = real_arg(kv, "t");
        if (!(t > 0.0)) throw domain_error("chi needs t > 0");
        print(chi({real_arg(kv, "r"), real_arg(kv, "s")}, t));
        return 0;
    }
    if (what == "gamma" || what == "sides") {
        if (config_path.empty()) throw config_error("eval " + what + " needs --config");
        const auto pb = build_problem(load_config(config_path));
        if (what == "gamma") {
            only(kv, {"y"});
            const auto g = gamma_at(GammaSpec(pb), list_arg(kv, "y"));
            std::string out = "[";
            for (std::size_t i = 0; i < g.rows(); ++i) out += (i ? ",[" : "[") + detail::num_list(g.row(i), digits) + "]";
            std::printf("%s]\n", out.c_str());
            return 0;
        }
        only(kv, {"x"});
        // rows separated by '/'
        std::vector<std::vector<double>> rows;
        std::stringstream ss(need(kv, "x"));
        for (std::string row; std::getline(ss, row, '/');) rows.push_back(detail::parse_list(row, "x"));
        Matrix x(rows.size(), rows.empty() ? 0 : rows[0].size());
        for (std::size_t l = 0; l < rows.size(); ++l) {
            if (rows[l].size() != x.cols()) throw shape_error("ragged matrix in x=");
            for (std::size_t j = 0; j < x.cols(); ++j) x(l, j) = rows[l][j];
        }
        const auto s = evaluate_sides(pb, x);
        std::printf("lhs = %s\nrhs = %s\ngap = %s\n", detail::num(s.lhs, digits).c_str(),
                    detail::num(s.rhs, digits).c_str(), detail::num(s.gap(), digits).c_str());
        return 0;
    }
    throw config_error("unknown eval target '" + what + "' (gini, power, chi, gamma, sides)");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Means inequality analyzer"};
    app.require_subcommand(1);

    std::string format = "human";
    std::string config_path;
    std::uint64_t seed = 1;
    std::size_t grid = 0, budget = 0;

    auto* eval = app.add_subcommand("eval", "evaluate a mean, chi, Gamma or both sides of an inequality");
    std::string what;
    std::vector<std::string> eval_args;
    eval->add_option("what", what, "gini | power | chi | gamma | sides")->required();
    eval->add_option("args", eval_args, "key=value arguments");
    eval->add_option("--config", config_path, "problem config (gamma, sides)");
    eval->add_option("--format", format)->check(CLI::IsMember({"human", "machine"}));

    auto* analyze_cmd = app.add_subcommand("analyze", "decide an inequality and search for counterexamples");
    analyze_cmd->add_option("--config", config_path, "problem config")->required();
    auto* seed_opt = analyze_cmd->add_option("--seed", seed, "search seed (overrides config)");
    analyze_cmd->add_option("--grid", grid, "grid points per axis (overrides config)");
    analyze_cmd->add_option("--budget", budget, "search budget in evaluations (overrides config)");
    analyze_cmd->add_option("--format", format)->check(CLI::IsMember({"human", "machine"}));

    auto* selftest = app.add_subcommand("selftest", "run the invariant suites at reduced scale");
    bool inject = false;
    selftest->add_option("--seed", seed, "random seed");
    selftest->add_flag("--inject-fault", inject, "perturb analytic values so suites must fail");
    selftest->add_option("--format", format)->check(CLI::IsMember({"human", "machine"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }
    const int digits = format == "machine" ? 17 : 6;

    try {
        if (*eval) return cmd_eval(what, eval_args, config_path, digits);
        if (*analyze_cmd) {
            auto cfg = load_config(config_path);
            if (seed_opt->count() > 0) cfg.seed = seed;
            if (grid) {
                if (grid < 3) throw config_error("--grid must be at least 3");
                cfg.grid = grid;
            }
            if (budget) cfg.budget = budget;
            const auto report = analyze(cfg);
            std::fputs((format == "machine" ? to_machine(report) : to_human(report)).c_str(), stdout);
            return report.exit_status;
        }
        const auto suites = run_selftest({seed, inject});
        std::size_t failed = 0;
        for (const auto& s : suites) {
            failed += s.total - s.passed;
            std::printf("suite %s: %zu/%zu passed\n", s.name.c_str(), s.passed, s.total);
        }
        std::printf("selftest: %zu failure%s\n", failed, failed == 1 ? "" : "s");
        return failed ? 1 : 0;
    } catch (const config_error& e) {
        std::fprintf(stderr, "meanineq: %s\n", e.what());
        return kExitUsage;
    } catch (const shape_error& e) {
        std::fprintf(stderr, "meanineq: %s\n", e.what());
        return kExitUsage;
    } catch (const domain_error& e) {
        std::fprintf(stderr, "meanineq: %s\n", e.what());
        return kExitData;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "meanineq: %s\n", e.what());
        return 70;
    }
}
