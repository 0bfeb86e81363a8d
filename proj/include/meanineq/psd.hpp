#pragma once

// Positive (semi)definiteness of symmetric matrices: a closed-form test for
// diag(c_1..c_k) + c_0 * ones, and a cyclic Jacobi eigenvalue oracle.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "meanineq/errors.hpp"
#include "meanineq/matrix.hpp"

namespace meanineq {

enum class PsdClass { PositiveDefinite, PositiveSemidefiniteOnly, Indefinite };

inline const char* to_string(PsdClass c)
{
    switch (c) {
    case PsdClass::PositiveDefinite: return "positive-definite";
    case PsdClass::PositiveSemidefiniteOnly: return "positive-semidefinite";
    case PsdClass::Indefinite: return "indefinite";
    }
    return "?";
}

inline bool is_psd(PsdClass c) { return c != PsdClass::Indefinite; }

struct PsdResult {
    PsdClass cls = PsdClass::Indefinite;
    std::string certificate;
};

/// C = (delta_ij c_i + c_0)_{i,j=1..k}.
struct ShiftedDiagonal {
    double c0 = 0.0;
    std::vector<double> c;

    ShiftedDiagonal(double c0_, std::vector<double> c_) : c0(c0_), c(std::move(c_))
    {
        if (c.size() < 2) throw shape_error("shifted diagonal matrix needs k >= 2");
        if (!std::isfinite(c0) || !std::all_of(c.begin(), c.end(), [](double v) { return std::isfinite(v); }))
            throw domain_error("shifted diagonal entries must be finite");
    }

    std::size_t size() const { return c.size(); }

    /// c_0, c_1, ..., c_k as one vector.
    std::vector<double> all() const
    {
        std::vector<double> v{c0};
        v.insert(v.end(), c.begin(), c.end());
        return v;
    }

    Matrix matrix() const
    {
        const std::size_t k = c.size();
        Matrix m(k, k, c0);
        for (std::size_t i = 0; i < k; ++i) m(i, i) += c[i];
        return m;
    }
};

inline constexpr double kPsdZeroThreshold = 1e-12;
inline constexpr double kPsdReciprocalBand = 1e-12;

namespace detail {

struct SignCounts {
    std::size_t negative = 0;
    std::size_t zero = 0;
    std::size_t negative_index = 0;
};

inline SignCounts count_signs(const std::vector<double>& all)
{
    SignCounts s;
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (std::abs(all[i]) <= kPsdZeroThreshold) {
            ++s.zero;
        } else if (all[i] < 0.0) {
            ++s.negative;
            s.negative_index = i;
        }
    }
    return s;
}

inline std::string fmt(const char* f, double v)
{
    char buf[128];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

} // namespace detail

/// Sum of 1/c_i over i = 0..k, and the band half-width 1e-12 * max 1/|c_i| used to call it zero.
inline std::pair<double, double> reciprocal_sum(const ShiftedDiagonal& m)
{
    double sum = 0.0, largest = 0.0;
    for (double v : m.all()) {
        sum += 1.0 / v;
        largest = std::max(largest, 1.0 / std::abs(v));
    }
    return {sum, kPsdReciprocalBand * largest};
}

inline PsdResult classify_shifted_diagonal(const ShiftedDiagonal& m)
{
    const auto all = m.all();
    const auto s = detail::count_signs(all);
    if (s.negative == 0) {
        if (s.zero <= 1) return {PsdClass::PositiveDefinite, "all c_i >= 0 with at most one zero"};
        return {PsdClass::PositiveSemidefiniteOnly, "all c_i >= 0 with " + std::to_string(s.zero) + " zeros"};
    }
    if (s.negative == 1 && s.zero == 0) {
        const auto [sum, band] = reciprocal_sum(m);
        const std::string tail = detail::fmt("reciprocal sum %.6g", sum);
        if (sum < -band) return {PsdClass::PositiveDefinite, "one negative c_i, " + tail + " < 0"};
        if (sum <= band) return {PsdClass::PositiveSemidefiniteOnly, "one negative c_i, " + tail + " = 0"};
        return {PsdClass::Indefinite, "one negative c_i, " + tail + " > 0"};
    }
    if (s.negative == 1) return {PsdClass::Indefinite, "one negative c_i together with a zero"};
    return {PsdClass::Indefinite, std::to_string(s.negative) + " negative c_i"};
}

/// x with x^T C x < 0 for a matrix classified Indefinite. Built in the coordinates
/// z_0..z_k with z_0 = -(z_1 + ... + z_k), where x^T C x = sum c_i z_i^2.
inline std::vector<double> indefinite_witness(const ShiftedDiagonal& m)
{
    if (classify_shifted_diagonal(m).cls != PsdClass::Indefinite)
        throw contract_error("witness requested for a positive semidefinite matrix");
    const auto all = m.all();
    const std::size_t k = m.size();
    std::vector<double> z(k + 1, 0.0);

    // two nonpositive entries, at least one negative: z = e_i - e_j
    std::vector<std::size_t> nonpos;
    for (std::size_t i = 0; i <= k; ++i)
        if (all[i] <= kPsdZeroThreshold) nonpos.push_back(i);
    if (nonpos.size() >= 2) {
        std::sort(nonpos.begin(), nonpos.end(), [&](std::size_t a, std::size_t b) { return all[a] < all[b]; });
        z[nonpos[0]] = 1.0;
        z[nonpos[1]] = -1.0;
    } else {
        // one negative c_i, reciprocal sum > 0: z_j = 1/c_j (j != i), z_i balances
        const std::size_t i = nonpos.front();
        double acc = 0.0;
        for (std::size_t j = 0; j <= k; ++j) {
            if (j == i) continue;
            z[j] = 1.0 / all[j];
            acc += z[j];
        }
        z[i] = -acc;
    }
    return {z.begin() + 1, z.end()};
}

struct EigenDecomposition {
    std::vector<double> values;  // ascending
    Matrix vectors;              // column j belongs to values[j]
};

/// Cyclic Jacobi rotations for a dense symmetric matrix.
inline EigenDecomposition jacobi_eigen(const Matrix& input)
{
    const std::size_t k = input.rows();
    if (input.cols() != k) throw shape_error("eigenvalues need a square matrix");
    Matrix a = input;
    Matrix v = Matrix::identity(k);
    double total = 0.0;
    for (double x : a.data()) total += x * x;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < k; ++p)
            for (std::size_t q = p + 1; q < k; ++q) off += a(p, q) * a(p, q);
        if (off <= 1e-32 * total || off == 0.0) break;
        for (std::size_t p = 0; p < k; ++p) {
            for (std::size_t q = p + 1; q < k; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t r = 0; r < k; ++r) {
                    const double arp = a(r, p), arq = a(r, q);
                    a(r, p) = c * arp - s * arq;
                    a(r, q) = s * arp + c * arq;
                }
                for (std::size_t r = 0; r < k; ++r) {
                    const double apr = a(p, r), aqr = a(q, r);
                    a(p, r) = c * apr - s * aqr;
                    a(q, r) = s * apr + c * aqr;
                }
                for (std::size_t r = 0; r < k; ++r) {
                    const double vrp = v(r, p), vrq = v(r, q);
                    v(r, p) = c * vrp - s * vrq;
                    v(r, q) = s * vrp + c * vrq;
                }
            }
        }
    }

    std::vector<std::size_t> order(k);
    for (std::size_t i = 0; i < k; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });
    EigenDecomposition out{std::vector<double>(k), Matrix(k, k)};
    for (std::size_t j = 0; j < k; ++j) {
        out.values[j] = a(order[j], order[j]);
        for (std::size_t r = 0; r < k; ++r) out.vectors(r, j) = v(r, order[j]);
    }
    return out;
}

inline void require_symmetric(const Matrix& m, double tol)
{
    if (m.rows() != m.cols()) throw shape_error("matrix is not square");
    const double scale = std::max(1.0, m.max_abs());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i + 1; j < m.cols(); ++j)
            if (std::abs(m(i, j) - m(j, i)) > tol * scale) throw shape_error("matrix is not symmetric");
}

/// Eigenvalue classification: PD if lambda_min > tol*scale, PSD-only if |lambda_min| <= tol*scale,
/// Indefinite otherwise; scale = max(1, spectral radius).
inline PsdResult classify_symmetric(const Matrix& m, double tol)
{
    require_symmetric(m, tol);
    const auto eig = jacobi_eigen(m);
    const double lmin = eig.values.front();
    const double radius = std::max(std::abs(lmin), std::abs(eig.values.back()));
    const double band = tol * std::max(1.0, radius);
    const std::string cert = detail::fmt("lambda_min %.6g", lmin) + detail::fmt(", band %.3g", band);
    if (lmin > band) return {PsdClass::PositiveDefinite, cert};
    if (lmin >= -band) return {PsdClass::PositiveSemidefiniteOnly, cert};
    return {PsdClass::Indefinite, cert};
}

} // namespace meanineq
