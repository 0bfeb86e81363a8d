#pragma once

// Analysis report with two renderings: machine ("key = value" lines in a fixed order,
// 17 significant digits, parseable back byte-for-byte) and human (6 digits).

#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "meanineq/config.hpp"
#include "meanineq/errors.hpp"
#include "meanineq/matrix.hpp"

namespace meanineq {

struct ReportCheck {
    std::string name;
    std::string cls;
    std::string evidence;

    friend bool operator==(const ReportCheck&, const ReportCheck&) = default;
};

struct ReportWitness {
    std::string origin;  // local-search | global-search
    Matrix x;
    double lhs = 0.0;
    double rhs = 0.0;
    double gap = 0.0;
    double distance_to_diagonal = 0.0;

    friend bool operator==(const ReportWitness&, const ReportWitness&) = default;
};

struct Report {
    std::string config;  // canonical config text
    bool weights_proportional = true;
    std::string local_method;
    std::string local_class;
    std::string local_summary;
    std::optional<std::vector<double>> local_witness_y;
    std::string global_method;
    std::string global_class;
    std::string global_evidence;
    std::vector<ReportCheck> checks;
    std::size_t derivative_points = 0;
    double derivative_max_abs = 0.0;
    double derivative_max_rel = 0.0;
    std::optional<ReportWitness> witness;
    std::string verdict;  // holds | fails | inconclusive
    int exit_status = 2;
    double total_ms = 0.0;

    friend bool operator==(const Report&, const Report&) = default;
};

namespace detail {

inline std::string one_line(std::string s)
{
    for (char& c : s)
        if (c == '\n' || c == '\r') c = ' ';
    return s;
}

inline std::string num(double v, int digits)
{
    if (v == kInf) return "inf";
    if (v == -kInf) return "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

inline std::string num_list(std::span<const double> v, int digits)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + num(v[i], digits);
    return out;
}

class LineReader {
public:
    explicit LineReader(const std::string& text)
    {
        std::stringstream ss(text);
        for (std::string line; std::getline(ss, line);) {
            const auto eq = line.find(" = ");
            if (eq == std::string::npos) throw config_error("report line without ' = ': " + line);
            lines_.emplace_back(line.substr(0, eq), line.substr(eq + 3));
        }
    }

    bool next_is(const std::string& key) const { return pos_ < lines_.size() && lines_[pos_].first == key; }
    bool next_has_prefix(const std::string& prefix) const
    {
        return pos_ < lines_.size() && lines_[pos_].first.rfind(prefix, 0) == 0;
    }
    const std::string& peek_key() const { return lines_[pos_].first; }

    std::string take(const std::string& key)
    {
        if (!next_is(key)) throw config_error("report: expected key '" + key + "'");
        return lines_[pos_++].second;
    }
    double take_real(const std::string& key) { return parse_real(take(key), "report " + key); }
    std::size_t take_count(const std::string& key) { return parse_unsigned(take(key), "report " + key); }
    std::vector<double> take_list(const std::string& key) { return parse_list(take(key), "report " + key); }
    bool done() const { return pos_ == lines_.size(); }

private:
    std::vector<std::pair<std::string, std::string>> lines_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline std::string to_machine(const Report& r)
{
    std::string out = "meanineq-report = 1\n";
    auto put = [&](const std::string& k, const std::string& v) { out += k + " = " + detail::one_line(v) + "\n"; };
    auto real = [&](const std::string& k, double v) { put(k, detail::num(v, 17)); };

    std::stringstream cfg(r.config);
    for (std::string line; std::getline(cfg, line);) {
        const auto eq = line.find(" = ");
        if (eq != std::string::npos) put("config." + line.substr(0, eq), line.substr(eq + 3));
    }
    put("weights.proportional", r.weights_proportional ? "true" : "false");
    put("local.method", r.local_method);
    put("local.class", r.local_class);
    put("local.summary", r.local_summary);
    if (r.local_witness_y) put("local.witness.y", detail::num_list(*r.local_witness_y, 17));
    put("global.method", r.global_method);
    put("global.class", r.global_class);
    put("global.evidence", r.global_evidence);
    for (const auto& c : r.checks) {
        put("check.name", c.name);
        put("check.class", c.cls);
        put("check.evidence", c.evidence);
    }
    put("derivative.points", std::to_string(r.derivative_points));
    real("derivative.max_abs_deviation", r.derivative_max_abs);
    real("derivative.max_rel_deviation", r.derivative_max_rel);
    if (r.witness) {
        const auto& w = *r.witness;
        put("witness.origin", w.origin);
        put("witness.rows", std::to_string(w.x.rows()));
        for (std::size_t l = 0; l < w.x.rows(); ++l) put("witness.row", detail::num_list(w.x.row(l), 17));
        real("witness.lhs", w.lhs);
        real("witness.rhs", w.rhs);
        real("witness.gap", w.gap);
        real("witness.distance_to_diagonal", w.distance_to_diagonal);
    }
    put("verdict", r.verdict);
    put("exit_status", std::to_string(r.exit_status));
    real("timing.total_ms", r.total_ms);
    return out;
}

inline Report parse_machine(const std::string& text)
{
    detail::LineReader in(text);
    if (in.take("meanineq-report") != "1") throw config_error("report: unsupported version");
    Report r;
    while (in.next_has_prefix("config.")) {
        const std::string key = in.peek_key();
        r.config += key.substr(7) + " = " + in.take(key) + "\n";
    }
    const auto prop = in.take("weights.proportional");
    if (prop != "true" && prop != "false") throw config_error("report: weights.proportional must be true or false");
    r.weights_proportional = prop == "true";
    r.local_method = in.take("local.method");
    r.local_class = in.take("local.class");
    r.local_summary = in.take("local.summary");
    if (in.next_is("local.witness.y")) r.local_witness_y = in.take_list("local.witness.y");
    r.global_method = in.take("global.method");
    r.global_class = in.take("global.class");
    r.global_evidence = in.take("global.evidence");
    while (in.next_is("check.name")) {
        ReportCheck c;
        c.name = in.take("check.name");
        c.cls = in.take("check.class");
        c.evidence = in.take("check.evidence");
        r.checks.push_back(c);
    }
    r.derivative_points = in.take_count("derivative.points");
    r.derivative_max_abs = in.take_real("derivative.max_abs_deviation");
    r.derivative_max_rel = in.take_real("derivative.max_rel_deviation");
    if (in.next_is("witness.origin")) {
        ReportWitness w;
        w.origin = in.take("witness.origin");
        const std::size_t rows = in.take_count("witness.rows");
        std::vector<std::vector<double>> data;
        for (std::size_t l = 0; l < rows; ++l) data.push_back(in.take_list("witness.row"));
        const std::size_t cols = rows ? data[0].size() : 0;
        w.x = Matrix(rows, cols);
        for (std::size_t l = 0; l < rows; ++l) {
            if (data[l].size() != cols) throw config_error("report: ragged witness matrix");
            for (std::size_t j = 0; j < cols; ++j) w.x(l, j) = data[l][j];
        }
        w.lhs = in.take_real("witness.lhs");
        w.rhs = in.take_real("witness.rhs");
        w.gap = in.take_real("witness.gap");
        w.distance_to_diagonal = in.take_real("witness.distance_to_diagonal");
        r.witness = std::move(w);
    }
    r.verdict = in.take("verdict");
    r.exit_status = static_cast<int>(in.take_count("exit_status"));
    r.total_ms = in.take_real("timing.total_ms");
    if (!in.done()) throw config_error("report: unexpected trailing lines");
    return r;
}

inline std::string to_human(const Report& r)
{
    std::string out = "problem\n";
    std::stringstream cfg(r.config);
    for (std::string line; std::getline(cfg, line);) out += "  " + line + "\n";
    out += std::string("weights: ") + (r.weights_proportional ? "proportional" : "not proportional") + "\n";
    out += "local (" + r.local_method + "): " + r.local_class + "\n  " + r.local_summary + "\n";
    if (r.local_witness_y) out += "  witness point y = (" + detail::num_list(*r.local_witness_y, 6) + ")\n";
    out += "global (" + r.global_method + "): " + r.global_class + "\n  " + r.global_evidence + "\n";
    for (const auto& c : r.checks) out += "check " + c.name + ": " + c.cls + "\n  " + c.evidence + "\n";
    out += "derivative check at " + std::to_string(r.derivative_points) + " diagonal points: max abs deviation " +
           detail::num(r.derivative_max_abs, 6) + ", max rel deviation " + detail::num(r.derivative_max_rel, 6) + "\n";
    if (r.witness) {
        const auto& w = *r.witness;
        out += "counterexample (" + w.origin + "), rows x_1..x_n:\n";
        for (std::size_t l = 0; l < w.x.rows(); ++l) out += "  [" + detail::num_list(w.x.row(l), 6) + "]\n";
        out += "  lhs " + detail::num(w.lhs, 6) + ", rhs " + detail::num(w.rhs, 6) + ", gap " + detail::num(w.gap, 6) +
               ", distance to diagonal " + detail::num(w.distance_to_diagonal, 6) + "\n";
    } else {
        out += "counterexample: none\n";
    }
    out += "verdict: " + r.verdict + " (exit " + std::to_string(r.exit_status) + ")\n";
    out += "time: " + detail::num(r.total_ms, 6) + " ms\n";
    return out;
}

} // namespace meanineq
