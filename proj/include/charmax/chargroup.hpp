#pragma once

/**
 * @file chargroup.hpp
 * @brief Characters and maximal partial sums on Z_M and Z_p^*.
 *
 * The maximal quantity at an evaluation point is max over prefixes of the
 * modulus of the running sum; it is computed with a single sweep per point.
 * Prefixes always range over 1..len of the supplied coefficient list.
 */

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "charmax/errors.hpp"
#include "charmax/numtheory.hpp"

namespace charmax {

using Complex = std::complex<double>;

/// e(t) = exp(2 pi i t), with t reduced mod 1 before the trig call.
inline Complex phase(double t) {
    double f = t - std::floor(t);
    double angle = 2.0 * std::numbers::pi * f;
    return {std::cos(angle), std::sin(angle)};
}

/// e(k / n) with k reduced exactly mod n.
inline Complex unit_root(i64 k, u64 n) {
    i64 r = k % static_cast<i64>(n);
    if (r < 0) r += static_cast<i64>(n);
    double angle = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(n);
    return {std::cos(angle), std::sin(angle)};
}

/// Table of e(k/n), k in [0, n).
class RootTable {
public:
    explicit RootTable(u64 n) : n_(n), roots_(n) {
        for (u64 k = 0; k < n; ++k) roots_[k] = unit_root(static_cast<i64>(k), n);
    }
    u64 order() const { return n_; }
    const Complex& operator[](u64 k) const { return roots_[k % n_]; }

private:
    u64 n_;
    std::vector<Complex> roots_;
};

// =============================================================================
// Coefficient vectors
// =============================================================================

struct CoefficientEntry {
    u64 index = 0; ///< positive, strictly increasing within a vector
    Complex value{};
};

class CoefficientVector {
public:
    CoefficientVector() = default;

    explicit CoefficientVector(std::vector<CoefficientEntry> entries) : entries_(std::move(entries)) {
        u64 prev = 0;
        for (const auto& e : entries_) {
            if (e.index <= prev) throw UsageError("CoefficientVector: indices must be positive and strictly increasing");
            prev = e.index;
        }
        recompute_norm();
    }

    /// Dense vector with indices 1..values.size().
    static CoefficientVector dense(std::span<const Complex> values) {
        std::vector<CoefficientEntry> entries;
        entries.reserve(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) entries.push_back({i + 1, values[i]});
        return CoefficientVector(std::move(entries));
    }
    static CoefficientVector dense(const std::vector<Complex>& values) {
        return dense(std::span<const Complex>(values));
    }

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const std::vector<CoefficientEntry>& entries() const { return entries_; }
    const CoefficientEntry& operator[](std::size_t i) const { return entries_[i]; }
    double norm() const { return norm2_; }
    u64 min_index() const { return entries_.empty() ? 0 : entries_.front().index; }
    u64 max_index() const { return entries_.empty() ? 0 : entries_.back().index; }

    std::vector<Complex> values() const {
        std::vector<Complex> v;
        v.reserve(entries_.size());
        for (const auto& e : entries_) v.push_back(e.value);
        return v;
    }

    CoefficientVector scaled(Complex c) const {
        auto out = entries_;
        for (auto& e : out) e.value *= c;
        return CoefficientVector(std::move(out));
    }

    /// Same indices, unit L2 norm. Throws on the zero vector.
    CoefficientVector normalized() const {
        if (norm2_ == 0.0) throw UsageError("CoefficientVector::normalized: zero vector");
        return scaled(1.0 / norm2_);
    }

private:
    void recompute_norm() {
        double s = 0.0;
        for (const auto& e : entries_) s += std::norm(e.value);
        norm2_ = std::sqrt(s);
    }

    std::vector<CoefficientEntry> entries_;
    double norm2_ = 0.0;
};

/// 1-based permutation of [n]; sigma[j] is the image of j+1.
using Permutation = std::vector<u64>;

inline bool is_permutation(const Permutation& sigma) {
    std::vector<bool> seen(sigma.size() + 1, false);
    for (u64 v : sigma) {
        if (v < 1 || v > sigma.size() || seen[v]) return false;
        seen[v] = true;
    }
    return true;
}

inline Permutation identity_permutation(std::size_t n) {
    Permutation p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = i + 1;
    return p;
}

// =============================================================================
// Maximal reports
// =============================================================================

struct PointMaximum {
    i64 x = 0;       ///< evaluation point (additive x or character index)
    double max = 0;  ///< max over prefixes of |partial sum|
    u64 argmax = 0;  ///< coefficient index ending the smallest maximizing prefix
};

struct MaximalReport {
    std::vector<PointMaximum> point_maxima;
    double l2_average = 0.0; ///< sqrt(mean of squared point maxima)
    double ratio = 0.0;      ///< l2_average / ||coefficients||_2

    double mean_square() const { return l2_average * l2_average; }
};

inline MaximalReport finish_report(std::vector<PointMaximum> points, double coefficient_norm) {
    MaximalReport r;
    double s = 0.0;
    for (const auto& pm : points) s += pm.max * pm.max;
    r.l2_average = points.empty() ? 0.0 : std::sqrt(s / static_cast<double>(points.size()));
    r.ratio = coefficient_norm > 0 ? r.l2_average / coefficient_norm : 0.0;
    r.point_maxima = std::move(points);
    return r;
}

namespace detail {

/// Running-prefix sweep. `term(j)` is the j-th summand (coefficient times phase).
/// Returns max |prefix| and the coefficient index closing the first maximizing prefix.
template <class TermFn>
inline std::pair<double, u64> prefix_sweep(const CoefficientVector& a, TermFn&& term) {
    Complex running{};
    double best = -1.0;
    u64 arg = 0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        running += term(j);
        double m = std::norm(running);
        if (m > best) {
            best = m;
            arg = a[j].index;
        }
    }
    return {best < 0 ? 0.0 : std::sqrt(best), arg};
}

} // namespace detail

// =============================================================================
// Characters of Z_p^*
// =============================================================================

/// chi_a(n) = e(a nu(n) / (p-1)) for character index a in [0, p-2].
inline Complex eval_character(const GroupContext& ctx, u64 a, u64 n) {
    if (n % ctx.p() == 0) throw UsageError("eval_character: n must be coprime to p");
    return unit_root(static_cast<i64>(mul_mod(a % ctx.order(), ctx.nu(n), ctx.order())), ctx.order());
}

/// For x in [1, x_count]: max over prefixes of |sum_{j<=l} b_j e(freq_j x / modulus)|.
/// Frequencies are arbitrary residues; the phase index is reduced exactly.
inline MaximalReport frequency_max_partial(const CoefficientVector& b, const std::vector<u64>& freq, u64 modulus,
                                           u64 x_count) {
    if (modulus < 1) throw UsageError("frequency_max_partial: modulus must be >= 1");
    if (freq.size() != b.size()) throw UsageError("frequency_max_partial: one frequency per coefficient required");
    RootTable roots(modulus);
    std::vector<u64> f(freq.size());
    for (std::size_t j = 0; j < f.size(); ++j) f[j] = freq[j] % modulus;
    std::vector<PointMaximum> points;
    points.reserve(x_count);
    for (u64 x = 1; x <= x_count; ++x) {
        const u64 xr = x % modulus;
        auto [mx, arg] =
            detail::prefix_sweep(b, [&](std::size_t j) { return b[j].value * roots[mul_mod(f[j], xr, modulus)]; });
        points.push_back({static_cast<i64>(x), mx, arg});
    }
    return finish_report(std::move(points), b.norm());
}

/// For x in [1, M]: max over prefixes of |sum_{n<=l} b_n e(sigma(n) x / M)|.
/// sigma[j] is applied to the j-th entry of b.
inline MaximalReport additive_max_partial(const CoefficientVector& b, const Permutation& sigma, u64 M) {
    if (M < 1) throw UsageError("additive_max_partial: M must be >= 1");
    if (sigma.size() != b.size() || !is_permutation(sigma))
        throw UsageError("additive_max_partial: sigma must be a permutation of the coefficient positions");
    return frequency_max_partial(b, sigma, M, M);
}

/// The continuous maximal function max_l |sum_{n<=l} b_n e(sigma(n) x)| at a real point x.
inline double additive_maximal_at(const CoefficientVector& b, const Permutation& sigma, double x) {
    if (sigma.size() != b.size()) throw UsageError("additive_maximal_at: sigma/b size mismatch");
    return detail::prefix_sweep(b, [&](std::size_t j) {
               double t = static_cast<double>(sigma[j]) * x;
               return b[j].value * phase(t);
           }).first;
}

/// Over all characters chi_a mod p: max over prefixes (natural integer order of n)
/// of |sum a_n chi(n)|, normalized by 1/(p-1). Work is O(p * support).
inline MaximalReport multiplicative_max_partial(const GroupContext& ctx, const CoefficientVector& a) {
    const u64 p = ctx.p();
    const u64 order = ctx.order();
    if (!a.empty() && (a.min_index() < 1 || a.max_index() > p - 1))
        throw UsageError("multiplicative_max_partial: indices must lie in [1, p-1]");
    RootTable roots(order);
    std::vector<u64> logs(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) logs[j] = ctx.nu(a[j].index) % order;
    std::vector<PointMaximum> points;
    points.reserve(order);
    for (u64 c = 0; c < order; ++c) {
        auto [mx, arg] = detail::prefix_sweep(a, [&](std::size_t j) { return a[j].value * roots[mul_mod(c, logs[j], order)]; });
        points.push_back({static_cast<i64>(c), mx, arg});
    }
    return finish_report(std::move(points), a.norm());
}

struct TransportValues {
    double lhs = 0.0; ///< (1/(p-1)) sum_chi max_l |sum a_n chi(g_n)|^2
    double rhs = 0.0; ///< (1/q) sum_{x in [q]} max_l |sum a_n e(nu_A(g_n) x / q)|^2
};

/// Both sides of the restriction identity for coefficients indexed by position
/// n in [1, q] of A's increasing enumeration g_1 < ... < g_q.
inline TransportValues transport_subgroup_to_additive(const SubgroupContext& sub, const CoefficientVector& a) {
    const u64 q = sub.q();
    if (!a.empty() && (a.min_index() < 1 || a.max_index() > q))
        throw UsageError("transport_subgroup_to_additive: positions must lie in [1, q]");
    const auto& elems = sub.elements();
    const GroupContext& parent = sub.parent();

    // Left side: full character sum over Z_p^*, evaluated at the residues g_n.
    const u64 order = parent.order();
    RootTable big(order);
    std::vector<u64> logs(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) logs[j] = parent.nu(elems[a[j].index - 1]) % order;
    double lhs = 0.0;
    for (u64 c = 0; c < order; ++c) {
        double m = detail::prefix_sweep(a, [&](std::size_t j) { return a[j].value * big[mul_mod(c, logs[j], order)]; }).first;
        lhs += m * m;
    }
    lhs /= static_cast<double>(order);

    // Right side: additive characters of Z_q through nu_A.
    RootTable small(q);
    std::vector<u64> sublogs(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) sublogs[j] = sub.nu(elems[a[j].index - 1]) % q;
    double rhs = 0.0;
    for (u64 x = 1; x <= q; ++x) {
        double m = detail::prefix_sweep(a, [&](std::size_t j) { return a[j].value * small[mul_mod(sublogs[j], x, q)]; }).first;
        rhs += m * m;
    }
    rhs /= static_cast<double>(q);
    return {lhs, rhs};
}

} // namespace charmax
