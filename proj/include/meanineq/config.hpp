#pragma once

// Problem configuration: line-based "key = value" text, '#' starts a comment.
//
//   outer   = gini 1.5 0.5            # or: power 2; optional trailing w=1,2,...
//   inner   = power 2                 # one line per inner mean (k >= 2)
//   phi     = sum                     # sum | product
//   box     = 0 inf                   # one line per inner mean, or a single line for all
//   n       = 2
//   weights = 1,1                     # default weights for every slot (uniform if absent)
//   grid    = 9
//   budget  = 100000
//   seed    = 1
//   local   = auto                    # auto | scan

#include <cerrno>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "meanineq/diagcalc.hpp"
#include "meanineq/errors.hpp"
#include "meanineq/interval.hpp"
#include "meanineq/means.hpp"

namespace meanineq {

struct SlotConfig {
    std::string family = "gini";  // gini | power
    double r = 1.0;
    double s = 0.0;
    std::vector<double> weights;  // empty: the config-wide default

    friend bool operator==(const SlotConfig&, const SlotConfig&) = default;
};

struct ProblemConfig {
    SlotConfig outer;
    std::vector<SlotConfig> inner;
    std::string phi = "sum";
    Box box;
    std::size_t n = 2;
    std::vector<double> weights;
    std::size_t grid = 9;
    std::size_t budget = 100000;
    std::uint64_t seed = 1;
    std::string local = "auto";

    friend bool operator==(const ProblemConfig&, const ProblemConfig&) = default;
};

namespace detail {

inline std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline double parse_real(const std::string& tok, const std::string& where)
{
    if (tok == "inf" || tok == "+inf") return kInf;
    if (tok == "-inf") return -kInf;
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (tok.empty() || *end != '\0' || std::isnan(v)) throw config_error(where + ": not a number: '" + tok + "'");
    return v;
}

inline std::uint64_t parse_unsigned(const std::string& tok, const std::string& where)
{
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
        throw config_error(where + ": not a non-negative integer: '" + tok + "'");
    errno = 0;
    const auto v = std::strtoull(tok.c_str(), nullptr, 10);
    if (errno == ERANGE) throw config_error(where + ": integer out of range");
    return v;
}

inline std::vector<double> parse_list(const std::string& text, const std::string& where)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(parse_real(trim(tok), where));
    if (out.empty()) throw config_error(where + ": empty list");
    return out;
}

inline std::string fmt17(double v) { return format_endpoint(v); }

inline std::string join(const std::vector<double>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + fmt17(v[i]);
    return out;
}

inline SlotConfig parse_slot(const std::string& value, const std::string& where)
{
    std::stringstream ss(value);
    std::vector<std::string> toks;
    for (std::string t; ss >> t;) toks.push_back(t);
    SlotConfig slot;
    if (!toks.empty() && toks.back().rfind("w=", 0) == 0) {
        slot.weights = parse_list(toks.back().substr(2), where);
        toks.pop_back();
    }
    if (toks.empty()) throw config_error(where + ": missing mean family");
    slot.family = toks[0];
    if (slot.family == "gini") {
        if (toks.size() != 3) throw config_error(where + ": expected 'gini r s'");
        slot.r = parse_real(toks[1], where);
        slot.s = parse_real(toks[2], where);
    } else if (slot.family == "power") {
        if (toks.size() != 2) throw config_error(where + ": expected 'power p'");
        slot.r = parse_real(toks[1], where);
        slot.s = 0.0;
    } else {
        throw config_error(where + ": unknown mean family '" + slot.family + "'");
    }
    if (!std::isfinite(slot.r) || !std::isfinite(slot.s)) throw config_error(where + ": exponents must be finite");
    return slot;
}

inline std::string format_slot(const SlotConfig& slot)
{
    std::string out = slot.family + " " + fmt17(slot.r);
    if (slot.family == "gini") out += " " + fmt17(slot.s);
    if (!slot.weights.empty()) out += " w=" + join(slot.weights);
    return out;
}

} // namespace detail

/// Parses a configuration. Unknown keys, malformed values and missing mandatory keys
/// (outer, inner) raise config_error with the line number.
inline ProblemConfig parse_config(const std::string& text)
{
    ProblemConfig cfg;
    bool have_outer = false;
    std::stringstream in(text);
    std::string line;
    for (std::size_t no = 1; std::getline(in, line); ++no) {
        if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
        line = detail::trim(line);
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(no);
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw config_error(where + ": expected 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (value.empty()) throw config_error(where + ": empty value for '" + key + "'");

        if (key == "outer") {
            cfg.outer = detail::parse_slot(value, where);
            have_outer = true;
        } else if (key == "inner") {
            cfg.inner.push_back(detail::parse_slot(value, where));
        } else if (key == "phi") {
            if (value != "sum" && value != "product") throw config_error(where + ": phi must be sum or product");
            cfg.phi = value;
        } else if (key == "box") {
            std::stringstream ss(value);
            std::string a, b, extra;
            if (!(ss >> a >> b) || (ss >> extra)) throw config_error(where + ": expected 'box = lo hi'");
            try {
                cfg.box.emplace_back(detail::parse_real(a, where), detail::parse_real(b, where));
            } catch (const domain_error& e) {
                throw config_error(where + ": " + e.what());
            }
        } else if (key == "n") {
            cfg.n = detail::parse_unsigned(value, where);
        } else if (key == "weights") {
            cfg.weights = detail::parse_list(value, where);
        } else if (key == "grid") {
            cfg.grid = detail::parse_unsigned(value, where);
        } else if (key == "budget") {
            cfg.budget = detail::parse_unsigned(value, where);
        } else if (key == "seed") {
            cfg.seed = detail::parse_unsigned(value, where);
        } else if (key == "local") {
            if (value != "auto" && value != "scan") throw config_error(where + ": local must be auto or scan");
            cfg.local = value;
        } else {
            throw config_error(where + ": unknown key '" + key + "'");
        }
    }
    if (!have_outer) throw config_error("missing 'outer'");
    if (cfg.inner.size() < 2) throw config_error("need at least two 'inner' lines");
    if (cfg.box.empty()) cfg.box.assign(cfg.inner.size(), Interval::positive());
    if (cfg.box.size() == 1) cfg.box.assign(cfg.inner.size(), cfg.box[0]);
    if (cfg.box.size() != cfg.inner.size()) throw config_error("give one 'box' line per inner mean, or exactly one");
    if (cfg.n < 2) throw config_error("n must be at least 2");
    if (cfg.grid < 3) throw config_error("grid must be at least 3");
    return cfg;
}

/// Canonical text: fixed key order, every box line expanded, shortest round-trip numbers.
inline std::string format_config(const ProblemConfig& cfg)
{
    std::string out = "outer = " + detail::format_slot(cfg.outer) + "\n";
    for (const auto& s : cfg.inner) out += "inner = " + detail::format_slot(s) + "\n";
    out += "phi = " + cfg.phi + "\n";
    for (const auto& iv : cfg.box) out += "box = " + format_endpoint(iv.lo) + " " + format_endpoint(iv.hi) + "\n";
    out += "n = " + std::to_string(cfg.n) + "\n";
    if (!cfg.weights.empty()) out += "weights = " + detail::join(cfg.weights) + "\n";
    out += "grid = " + std::to_string(cfg.grid) + "\n";
    out += "budget = " + std::to_string(cfg.budget) + "\n";
    out += "seed = " + std::to_string(cfg.seed) + "\n";
    out += "local = " + cfg.local + "\n";
    return out;
}

inline MeanSpec make_mean(const SlotConfig& slot, const ProblemConfig& cfg)
{
    const auto& w = slot.weights.empty() ? cfg.weights : slot.weights;
    Weights weights = w.empty() ? Weights::uniform(cfg.n) : Weights(w);
    if (weights.size() != cfg.n) throw config_error("weight list length differs from n");
    return slot.family == "power" ? power(slot.r, std::move(weights)) : gini(slot.r, slot.s, std::move(weights));
}

/// Builds the inequality problem; invalid combinations (domains, shapes) become config_error.
inline InequalityProblem build_problem(const ProblemConfig& cfg)
{
    try {
        std::vector<MeanSpec> inner;
        for (const auto& s : cfg.inner) inner.push_back(make_mean(s, cfg));
        return InequalityProblem(make_mean(cfg.outer, cfg), std::move(inner),
                                 cfg.phi == "product" ? PhiSpec::product() : PhiSpec::sum(), cfg.box);
    } catch (const domain_error& e) {
        throw config_error(std::string("invalid problem: ") + e.what());
    } catch (const shape_error& e) {
        throw config_error(std::string("invalid problem: ") + e.what());
    }
}

/// True when every slot uses uniform weights.
inline bool uniform_weights(const ProblemConfig& cfg)
{
    auto uniform = [&](const SlotConfig& s) {
        const auto& w = s.weights.empty() ? cfg.weights : s.weights;
        return w.empty() || Weights(w).is_uniform();
    };
    if (!uniform(cfg.outer)) return false;
    for (const auto& s : cfg.inner)
        if (!uniform(s)) return false;
    return true;
}

} // namespace meanineq
