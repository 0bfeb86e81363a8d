#pragma once

// Counterexample search: explicit n x k matrices x with deficiency F(x) < -1e-9,
// near the diagonal (local) or over the whole box (global), plus greedy shrinking.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "meanineq/diagcalc.hpp"
#include "meanineq/errors.hpp"
#include "meanineq/local.hpp"
#include "meanineq/matrix.hpp"
#include "meanineq/parallel.hpp"
#include "meanineq/psd.hpp"

namespace meanineq {

inline constexpr double kViolationTolerance = 1e-9;

struct Counterexample {
    Matrix x;
    double lhs = 0.0;
    double rhs = 0.0;
    double gap = 0.0;  // rhs - lhs, the deficiency
    double distance_to_diagonal = 0.0;
};

/// Frobenius distance from x to the diagonal point built from its column means.
inline double distance_to_diagonal(const Matrix& x)
{
    double acc = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) {
        const auto c = x.column(j);
        double m = 0.0;
        for (double v : c) m += v;
        m /= double(c.size());
        for (double v : c) acc += (v - m) * (v - m);
    }
    return std::sqrt(acc);
}

/// Re-evaluates x from scratch; returns a Counterexample only if it violates.
inline std::optional<Counterexample> validate_witness(const InequalityProblem& pb, const Matrix& x)
{
    Sides s;
    try {
        s = evaluate_sides(pb, x);
    } catch (const domain_error&) {
        return std::nullopt;
    }
    if (!(s.gap() < -kViolationTolerance)) return std::nullopt;
    return Counterexample{x, s.lhs, s.rhs, s.gap(), distance_to_diagonal(x)};
}

namespace detail {

struct Evaluation {
    double gap = kInf;
    double score = kInf;  // gap relative to the size of both sides
};

inline Evaluation evaluate_point(const InequalityProblem& pb, const Matrix& x)
{
    try {
        const auto s = evaluate_sides(pb, x);
        const double g = s.gap();
        if (!std::isfinite(g)) return {};
        return {g, g / std::max({1.0, std::abs(s.lhs), std::abs(s.rhs)})};
    } catch (const domain_error&) {
        return {};
    } catch (const numeric_error&) {
        return {};
    }
}

// Finite sampling window of an interval: positive axes keep at most four decades beyond a
// finite end (1e-2 .. 1e2 when both ends are open at 0 and infinity).
inline std::pair<double, double> search_range(const Interval& iv)
{
    if (iv.on_positive_axis()) {
        double lo = iv.lo, hi = iv.hi;
        if (lo == 0.0) lo = std::isfinite(hi) ? std::min(1e-2, hi * 1e-4) : 1e-2;
        if (!std::isfinite(hi)) hi = std::max(1e2, lo * 1e4);
        return {lo, hi};
    }
    double lo = std::isfinite(iv.lo) ? iv.lo : std::min(-1e2, iv.hi - 1e2);
    double hi = std::isfinite(iv.hi) ? iv.hi : std::max(1e2, lo + 1e2);
    return {lo, hi};
}

class BoxSampler {
public:
    explicit BoxSampler(const Box& box) : box_(box)
    {
        for (const auto& iv : box) ranges_.push_back(search_range(iv));
    }

    double coordinate(std::size_t j, std::mt19937_64& rng) const
    {
        auto [lo, hi] = ranges_[j];
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int attempt = 0; attempt < 16; ++attempt) {
            const double t = u(rng);
            const double v = box_[j].on_positive_axis() ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)))
                                                        : lo + t * (hi - lo);
            if (box_[j].contains(v)) return v;
        }
        return std::sqrt(lo * hi);
    }

    // Multiplicative perturbation on positive axes, additive otherwise; stays in the box
    // and in the sampling window.
    double perturb(std::size_t j, double v, double sigma, double normal) const
    {
        const double w = box_[j].on_positive_axis() ? v * std::exp(sigma * normal)
                                                    : v + sigma * std::max(1.0, std::abs(v)) * normal;
        const bool inside = box_[j].contains(w) && w >= ranges_[j].first && w <= ranges_[j].second;
        return inside ? w : v;
    }

private:
    const Box& box_;
    std::vector<std::pair<double, double>> ranges_;
};

// Coordinate descent on the relative gap; steps halve from 0.5 down to 1e-8 (relative).
inline Matrix refine(const InequalityProblem& pb, Matrix x, std::size_t budget, const BoxSampler& sampler)
{
    Evaluation best = evaluate_point(pb, x);
    std::size_t used = 0;
    for (double h = 0.5; h >= 1e-8 && used < budget; h *= 0.5) {
        bool improved = true;
        while (improved && used < budget) {
            improved = false;
            for (std::size_t l = 0; l < x.rows() && used < budget; ++l)
                for (std::size_t j = 0; j < x.cols() && used < budget; ++j)
                    for (double sign : {1.0, -1.0}) {
                        if (used >= budget) break;
                        Matrix c = x;
                        c(l, j) = sampler.perturb(j, x(l, j), h, sign);
                        if (c(l, j) == x(l, j)) continue;
                        ++used;
                        const auto e = evaluate_point(pb, c);
                        if (e.score < best.score) {
                            best = e;
                            x = std::move(c);
                            improved = true;
                            break;
                        }
                    }
        }
    }
    return x;
}

// Directions (n x k matrices) along which F decreases to first or second order at Delta(y).
inline std::vector<Matrix> seed_directions(const InequalityProblem& pb, std::span<const double> y,
                                           const std::optional<std::vector<double>>& direction)
{
    std::vector<Matrix> seeds;
    std::optional<std::vector<double>> d = direction;
    if (!d) {
        try {
            GammaSpec spec(pb);
            const auto e = jacobi_eigen(gamma_at(spec, y));
            if (e.values[0] < 0.0) d = e.vectors.column(0);
        } catch (const std::exception&) {
        }
    }
    if (d) {
        for (std::size_t a = 0; a < pb.n; ++a)
            for (std::size_t b = a + 1; b < pb.n; ++b)
                for (double sign : {1.0, -1.0}) {
                    Matrix p(pb.n, pb.k);
                    for (std::size_t j = 0; j < pb.k; ++j) {
                        p(a, j) = sign * (*d)[j];
                        p(b, j) = -sign * (*d)[j];
                    }
                    seeds.push_back(p);
                }
    }
    try {
        const auto g = deficiency_first_partials(pb, y);
        double norm = 0.0;
        for (double v : g) norm = std::max(norm, std::abs(v));
        if (norm > 1e-12) {
            Matrix p(pb.n, pb.k);
            for (std::size_t i = 0; i < pb.k; ++i)
                for (std::size_t l = 0; l < pb.n; ++l) p(l, i) = -g[i * pb.n + l] / norm;
            seeds.push_back(p);
        }
    } catch (const std::exception&) {
    }
    return seeds;
}

} // namespace detail

/// Samples x = Delta(center) + eps eta with eps = radius 2^-m (relative to the center's size),
/// first along the seeded directions (the negative eigendirection of Gamma(center), or the
/// given one, spread over row pairs; and -grad F), then along random Gaussian eta.
/// Returns the first violating x, or nothing once budget evaluations are spent.
inline std::optional<Counterexample> search_local(const InequalityProblem& pb, std::span<const double> center,
                                                  double radius, std::size_t budget, std::uint64_t seed = 0,
                                                  const std::optional<std::vector<double>>& direction = std::nullopt)
{
    if (center.size() != pb.k) throw shape_error("center must have one coordinate per inner mean");
    if (!box_contains(pb.box, {center.begin(), center.end()})) throw domain_error("center outside the box");
    if (!(radius > 0.0)) throw domain_error("radius must be positive");
    if (budget == 0) return std::nullopt;

    const Matrix base = diagonal_point(pb.n, center);
    std::vector<double> scale(pb.k);
    for (std::size_t j = 0; j < pb.k; ++j)
        scale[j] = pb.box[j].on_positive_axis() ? center[j] : std::max(1.0, std::abs(center[j]));
    std::size_t used = 0;

    auto try_point = [&](const Matrix& x) -> std::optional<Counterexample> {
        for (std::size_t l = 0; l < pb.n; ++l)
            for (std::size_t j = 0; j < pb.k; ++j)
                if (!pb.box[j].contains(x(l, j))) return std::nullopt;
        ++used;
        if (detail::evaluate_point(pb, x).gap < -kViolationTolerance) return validate_witness(pb, x);
        return std::nullopt;
    };

    // seeds keep their direction in x, so all columns share one scale
    const auto seeds = detail::seed_directions(pb, center, direction);
    const double common = *std::max_element(scale.begin(), scale.end());
    for (int m = 0; m <= 20 && used < budget; ++m) {
        const double eps = radius * std::ldexp(1.0, -m);
        for (const auto& p : seeds) {
            if (used >= budget) break;
            Matrix x = base;
            for (std::size_t l = 0; l < pb.n; ++l)
                for (std::size_t j = 0; j < pb.k; ++j) x(l, j) += eps * common * p(l, j);
            if (auto w = try_point(x)) return w;
        }
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    for (int m = 0; used < budget; m = (m + 1) % 21) {
        const double eps = radius * std::ldexp(1.0, -m);
        Matrix x = base;
        for (std::size_t l = 0; l < pb.n; ++l)
            for (std::size_t j = 0; j < pb.k; ++j) x(l, j) += eps * scale[j] * normal(rng);
        const std::size_t before = used;
        if (auto w = try_point(x)) return w;
        if (used == before) ++used;  // out-of-box draws still cost a sample
    }
    return std::nullopt;
}

/// Random sampling over the box in 8 independent streams (log-uniform on positive axes; half the
/// samples are multiplicative perturbations of random diagonal points), then coordinate descent
/// from the sample with the smallest relative gap. Four fifths of the budget go to sampling.
inline std::optional<Counterexample> search_global(const InequalityProblem& pb, std::size_t budget, std::uint64_t seed)
{
    if (budget == 0) return std::nullopt;
    constexpr std::size_t kStreams = 8;
    const detail::BoxSampler sampler(pb.box);
    const std::size_t sampling = budget - budget / 5;

    struct Best {
        Matrix x;
        detail::Evaluation e;
    };
    std::vector<Best> best(kStreams);
    parallel_for(kStreams, [&](std::size_t s) {
        std::seed_seq sq{std::uint64_t(seed), std::uint64_t(s)};
        std::mt19937_64 rng(sq);
        std::normal_distribution<double> normal;
        std::uniform_real_distribution<double> logsigma(std::log(1e-3), 0.0);
        const std::size_t count = sampling / kStreams + (s < sampling % kStreams ? 1 : 0);
        Matrix x(pb.n, pb.k);
        std::vector<double> y(pb.k);
        for (std::size_t i = 0; i < count; ++i) {
            if (i % 2 == 0) {
                for (std::size_t l = 0; l < pb.n; ++l)
                    for (std::size_t j = 0; j < pb.k; ++j) x(l, j) = sampler.coordinate(j, rng);
            } else {
                const double sigma = std::exp(logsigma(rng));
                for (std::size_t j = 0; j < pb.k; ++j) y[j] = sampler.coordinate(j, rng);
                for (std::size_t l = 0; l < pb.n; ++l)
                    for (std::size_t j = 0; j < pb.k; ++j) x(l, j) = sampler.perturb(j, y[j], sigma, normal(rng));
            }
            const auto e = detail::evaluate_point(pb, x);
            if (e.score < best[s].e.score) best[s] = {x, e};
        }
    });

    std::size_t pick = kStreams;
    for (std::size_t s = 0; s < kStreams; ++s)
        if (best[s].x.rows() != 0 && (pick == kStreams || best[s].e.score < best[pick].e.score)) pick = s;
    if (pick == kStreams) return std::nullopt;

    const Matrix x = detail::refine(pb, best[pick].x, budget - sampling, sampler);
    if (auto w = validate_witness(pb, x)) return w;
    return validate_witness(pb, best[pick].x);
}

/// Moves single entries toward their column mean (fully, then by 1/2, 1/4, 1/10 of the way)
/// while the deficiency stays below -1e-9, until no move is accepted.
inline Counterexample shrink(const InequalityProblem& pb, const Counterexample& witness)
{
    auto current = validate_witness(pb, witness.x);
    if (!current) throw contract_error("shrink needs a violating witness");
    for (int round = 0; round < 200; ++round) {
        bool moved = false;
        for (std::size_t l = 0; l < pb.n; ++l)
            for (std::size_t j = 0; j < pb.k; ++j) {
                const auto col = current->x.column(j);
                double m = 0.0;
                for (double v : col) m += v;
                m /= double(col.size());
                const double dev = current->x(l, j) - m;
                if (dev == 0.0) continue;
                for (double keep : {0.0, 0.5, 0.75, 0.9}) {
                    Matrix c = current->x;
                    c(l, j) = m + keep * dev;
                    if (c(l, j) == current->x(l, j)) continue;
                    auto w = validate_witness(pb, c);
                    if (w && w->distance_to_diagonal < current->distance_to_diagonal) {
                        current = std::move(w);
                        moved = true;
                        break;
                    }
                }
            }
        if (!moved) break;
    }
    return *current;
}

/// Runs search_global on make(n) for n = 2..max_n and returns the first witness.
inline std::optional<Counterexample> search_over_n(const std::function<InequalityProblem(std::size_t)>& make,
                                                   std::size_t budget, std::uint64_t seed, std::size_t max_n = 8)
{
    for (std::size_t n = 2; n <= max_n; ++n)
        if (auto w = search_global(make(n), budget, seed)) return w;
    return std::nullopt;
}

} // namespace meanineq
