#pragma once

/**
 * @file discrepancy.hpp
 * @brief Power-orbit point sets of a prime-order subgroup A of Z_p^* and the
 * equidistribution tools around them: the (3s)^s grid-box coverage test, the
 * Erdos-Turan-Koksma upper bound, a grid lower bound on discrepancy, complete
 * exponential sums of polynomials, and the search for an element of A whose
 * powers appear in a prescribed order.
 *
 * Coordinates of subgroup point sets are kept as exact numerators over p so
 * every box and ordering decision is integer arithmetic.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "charmax/chargroup.hpp"
#include "charmax/errors.hpp"
#include "charmax/numtheory.hpp"

namespace charmax {

struct PointSet {
    std::size_t s = 0;
    std::vector<std::vector<double>> points;
    /// Optional exact form: coordinate k of point i is numerators[i][k] / denominator.
    std::vector<std::vector<u64>> numerators;
    u64 denominator = 0;
    std::string provenance;

    std::size_t size() const { return points.size(); }
    bool exact() const { return denominator != 0; }

    static PointSet from_doubles(std::size_t s, std::vector<std::vector<double>> pts, std::string provenance = {}) {
        for (const auto& x : pts) {
            if (x.size() != s) throw UsageError("PointSet: point dimension mismatch");
            for (double c : x)
                if (!(c >= 0.0 && c < 1.0)) throw UsageError("PointSet: coordinates must lie in [0,1)");
        }
        PointSet ps;
        ps.s = s;
        ps.points = std::move(pts);
        ps.provenance = std::move(provenance);
        return ps;
    }

    /// Interval index of coordinate k of point i when [0,1) is cut into `parts` pieces.
    u64 cell(std::size_t i, std::size_t k, u64 parts) const {
        if (exact()) return numerators[i][k] * parts / denominator;
        auto c = static_cast<u64>(std::floor(points[i][k] * static_cast<double>(parts)));
        return std::min(c, parts - 1);
    }
};

/// r(h) = prod max(1, |h_i|).
inline double lattice_weight(const std::vector<i64>& h) {
    double r = 1.0;
    for (i64 v : h) r *= static_cast<double>(std::max<i64>(1, v < 0 ? -v : v));
    return r;
}

/// y_i = ({g_i / p}, {g_i^2 / p}, ..., {g_i^s / p}) for A's elements in increasing order.
inline PointSet subgroup_point_set(const SubgroupContext& sub, std::size_t s) {
    if (s < 1) throw UsageError("subgroup_point_set: s must be >= 1");
    const u64 p = sub.p();
    PointSet ps;
    ps.s = s;
    ps.denominator = p;
    ps.provenance = "subgroup orbit p=" + std::to_string(p) + " q=" + std::to_string(sub.q());
    for (u64 g : sub.elements()) {
        std::vector<u64> num(s);
        std::vector<double> x(s);
        u64 power = 1;
        for (std::size_t k = 0; k < s; ++k) {
            power = mul_mod(power, g, p);
            num[k] = power;
            x[k] = static_cast<double>(power) / static_cast<double>(p);
        }
        ps.numerators.push_back(std::move(num));
        ps.points.push_back(std::move(x));
    }
    return ps;
}

struct CoverageResult {
    bool covered = false;
    std::vector<std::vector<u64>> missing; ///< box multi-indices with no point
};

inline constexpr u64 kMaxBoxes = 10'000'000;

/// Cuts [0,1)^s into (3s)^s half-open boxes and reports the empty ones.
inline CoverageResult grid_box_coverage(const PointSet& ps) {
    const std::size_t s = ps.s;
    if (s < 1) throw UsageError("grid_box_coverage: empty dimension");
    const u64 side = 3 * s;
    double boxes = std::pow(static_cast<double>(side), static_cast<double>(s));
    if (boxes > static_cast<double>(kMaxBoxes))
        throw BudgetError("grid_box_coverage: (3s)^s = " + std::to_string(static_cast<u64>(boxes)) + " exceeds budget");
    const auto total = static_cast<u64>(boxes);
    std::vector<bool> hit(total, false);
    for (std::size_t i = 0; i < ps.size(); ++i) {
        u64 code = 0;
        for (std::size_t k = 0; k < s; ++k) code = code * side + ps.cell(i, k, side);
        hit[code] = true;
    }
    CoverageResult res;
    for (u64 code = 0; code < total; ++code) {
        if (hit[code]) continue;
        std::vector<u64> idx(s);
        u64 c = code;
        for (std::size_t k = s; k-- > 0;) {
            idx[k] = c % side;
            c /= side;
        }
        res.missing.push_back(std::move(idx));
    }
    res.covered = res.missing.empty();
    return res;
}

/// True iff some point has coordinate sigma(k) inside the middle third of
/// group k, for every k. Such a point has {x^sigma(1)} < ... < {x^sigma(s)},
/// which is what find_ordered_element asks for with the same sigma.
inline bool ordered_middle_box_check(const PointSet& ps, const Permutation& sigma) {
    const std::size_t s = ps.s;
    if (sigma.size() != s || !is_permutation(sigma)) throw UsageError("ordered_middle_box_check: sigma must permute [s]");
    const u64 side = 3 * s;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        bool inside = true;
        for (std::size_t k = 0; k < s && inside; ++k) {
            // group k+1 occupies intervals 3k, 3k+1, 3k+2; the middle one is 3k+1.
            inside = ps.cell(i, sigma[k] - 1, side) == 3 * k + 1;
        }
        if (inside) return true;
    }
    return false;
}

inline constexpr double kMaxLatticeVectors = 10'000'000.0;

/// 2 s^2 3^(s+1) (1/m + sum_{0 < |h|_inf <= m} |(1/N) sum_n e(<h, x_n>)| / r(h)).
inline double etk_bound(const PointSet& ps, u64 m) {
    const std::size_t s = ps.s;
    if (m < 1) throw UsageError("etk_bound: m must be >= 1");
    if (ps.size() == 0) throw UsageError("etk_bound: empty point set");
    const u64 side = 2 * m + 1;
    const double count = std::pow(static_cast<double>(side), static_cast<double>(s)) - 1.0;
    if (count * static_cast<double>(ps.size()) > kMaxLatticeVectors * 100.0 || count > kMaxLatticeVectors)
        throw BudgetError("etk_bound: lattice enumeration exceeds budget");
    const auto total = static_cast<u64>(count) + 1;
    const double N = static_cast<double>(ps.size());
    std::optional<RootTable> roots;
    if (ps.exact()) roots.emplace(ps.denominator);

    std::vector<i64> h(s);
    double weighted = 0.0;
    for (u64 code = 0; code < total; ++code) {
        u64 c = code;
        bool zero = true;
        for (std::size_t k = 0; k < s; ++k) {
            h[k] = static_cast<i64>(c % side) - static_cast<i64>(m);
            c /= side;
            zero = zero && h[k] == 0;
        }
        if (zero) continue;
        Complex sum{};
        if (ps.exact()) {
            const u64 p = ps.denominator;
            for (const auto& num : ps.numerators) {
                i64 t = 0;
                for (std::size_t k = 0; k < s; ++k) t = (t + h[k] * static_cast<i64>(num[k])) % static_cast<i64>(p);
                if (t < 0) t += static_cast<i64>(p);
                sum += (*roots)[static_cast<u64>(t)];
            }
        } else {
            for (const auto& x : ps.points) {
                double t = 0.0;
                for (std::size_t k = 0; k < s; ++k) t += static_cast<double>(h[k]) * x[k];
                sum += phase(t);
            }
        }
        weighted += std::abs(sum) / N / lattice_weight(h);
    }
    const double sd = static_cast<double>(s);
    return 2.0 * sd * sd * std::pow(3.0, sd + 1.0) * (1.0 / static_cast<double>(m) + weighted);
}

/// m = ceil(s^(delta1 * s)), the schedule used to balance the two ETK terms.
inline u64 etk_m_schedule(std::size_t s, double delta1 = 1.0) {
    double m = std::ceil(std::pow(static_cast<double>(s), delta1 * static_cast<double>(s)));
    return m < 1.0 ? 1 : static_cast<u64>(m);
}

/// Largest |fraction in box - volume| over half-open boxes with corners on the
/// grid {0, 1/R, ..., 1}^s. A lower bound on the true discrepancy.
inline double empirical_grid_discrepancy(const PointSet& ps, u64 resolution) {
    const std::size_t s = ps.s;
    const u64 R = resolution;
    if (R < 1) throw UsageError("empirical_grid_discrepancy: resolution must be >= 1");
    if (ps.size() == 0) throw UsageError("empirical_grid_discrepancy: empty point set");
    const double intervals = static_cast<double>(R) * static_cast<double>(R + 1) / 2.0;
    const double work = std::pow(intervals, static_cast<double>(s)) * std::pow(2.0, static_cast<double>(s));
    if (work > 5e8) throw BudgetError("empirical_grid_discrepancy: box enumeration exceeds budget");

    // prefix[i_1..i_s] = number of points with cell_k < i_k for all k, i_k in [0, R].
    const u64 W = R + 1;
    const auto cells = static_cast<u64>(std::pow(static_cast<double>(W), static_cast<double>(s)));
    std::vector<double> prefix(cells, 0.0);
    std::vector<u64> stride(s);
    {
        u64 st = 1;
        for (std::size_t k = s; k-- > 0;) {
            stride[k] = st;
            st *= W;
        }
    }
    for (std::size_t i = 0; i < ps.size(); ++i) {
        u64 code = 0;
        for (std::size_t k = 0; k < s; ++k) code += (ps.cell(i, k, R) + 1) * stride[k];
        prefix[code] += 1.0;
    }
    for (std::size_t k = 0; k < s; ++k) {
        for (u64 code = 0; code < cells; ++code) {
            if ((code / stride[k]) % W != 0) prefix[code] += prefix[code - stride[k]];
        }
    }

    // Enumerate (lo_k, hi_k) with 0 <= lo_k < hi_k <= R in every coordinate.
    std::vector<std::pair<u64, u64>> spans;
    for (u64 lo = 0; lo < R; ++lo)
        for (u64 hi = lo + 1; hi <= R; ++hi) spans.push_back({lo, hi});
    const u64 S = spans.size();
    const auto boxes = static_cast<u64>(std::pow(static_cast<double>(S), static_cast<double>(s)));
    const double N = static_cast<double>(ps.size());
    double worst = 0.0;
    std::vector<std::size_t> choice(s);
    for (u64 code = 0; code < boxes; ++code) {
        u64 c = code;
        double volume = 1.0;
        for (std::size_t k = 0; k < s; ++k) {
            choice[k] = c % S;
            c /= S;
            volume *= static_cast<double>(spans[choice[k]].second - spans[choice[k]].first) / static_cast<double>(R);
        }
        double count = 0.0;
        for (u64 corner = 0; corner < (u64{1} << s); ++corner) {
            u64 idx = 0;
            int lows = 0;
            for (std::size_t k = 0; k < s; ++k) {
                bool low = corner >> k & 1;
                lows += low;
                idx += (low ? spans[choice[k]].first : spans[choice[k]].second) * stride[k];
            }
            count += (lows % 2 == 0 ? 1.0 : -1.0) * prefix[idx];
        }
        worst = std::max(worst, std::abs(count / N - volume));
    }
    return worst;
}

/// sum_{x=0}^{p-1} e(g(x) / p) for g = coeffs[0] + coeffs[1] x + ... + coeffs[n] x^n.
/// Requires 0 < n < p and p not dividing the leading coefficient.
inline Complex weil_sum(u64 p, const std::vector<i64>& coeffs) {
    if (!is_prime(p)) throw UsageError("weil_sum: p must be prime");
    if (coeffs.size() < 2) throw UsageError("weil_sum: degree must be >= 1");
    const u64 n = coeffs.size() - 1;
    const auto P = static_cast<i64>(p);
    auto reduce = [P](i64 v) {
        i64 r = v % P;
        return r < 0 ? r + P : r;
    };
    if (n >= p) throw UsageError("weil_sum: degree must be < p");
    if (reduce(coeffs.back()) == 0) throw UsageError("weil_sum: p divides the leading coefficient");
    std::vector<u64> c(coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i) c[i] = static_cast<u64>(reduce(coeffs[i]));
    RootTable roots(p);
    Complex sum{};
    for (u64 x = 0; x < p; ++x) {
        u64 v = 0;
        for (std::size_t i = c.size(); i-- > 0;) v = (mul_mod(v, x, p) + c[i]) % p;
        sum += roots[v];
    }
    return sum;
}

struct FhIdentity {
    Complex lhs; ///< (1/q) sum_{g in A} e((h_1 g + ... + h_s g^s) / p)
    Complex rhs; ///< (1/(p-1)) (-1 + sum_{x=0}^{p-1} e(f_h(x) / p))
};

/// Both sides of the exponential-sum identity over A, each by direct summation;
/// f_h(x) = h_1 x^{(p-1)/q} + ... + h_s x^{s(p-1)/q}.
inline FhIdentity fh_identity_check(const SubgroupContext& sub, const std::vector<i64>& h, std::size_t s) {
    if (h.size() != s) throw UsageError("fh_identity_check: h must have length s");
    const u64 p = sub.p();
    const auto P = static_cast<i64>(p);
    const u64 cofactor = (p - 1) / sub.q();
    RootTable roots(p);
    auto hred = [&](std::size_t k) {
        i64 r = h[k] % P;
        return static_cast<u64>(r < 0 ? r + P : r);
    };

    Complex lhs{};
    for (u64 g : sub.elements()) {
        u64 t = 0, power = 1;
        for (std::size_t k = 0; k < s; ++k) {
            power = mul_mod(power, g, p);
            t = (t + mul_mod(hred(k), power, p)) % p;
        }
        lhs += roots[t];
    }
    lhs /= static_cast<double>(sub.q());

    Complex full{};
    for (u64 x = 0; x < p; ++x) {
        u64 t = 0;
        for (std::size_t k = 0; k < s; ++k) t = (t + mul_mod(hred(k), pow_mod(x, (k + 1) * cofactor, p), p)) % p;
        full += roots[t];
    }
    Complex rhs = (full - 1.0) / static_cast<double>(p - 1);
    return {lhs, rhs};
}

/// First non-identity g in A (increasing order) with
/// (g^sigma(1) mod p) < (g^sigma(2) mod p) < ... < (g^sigma(s) mod p).
inline std::optional<u64> find_ordered_element(const SubgroupContext& sub, std::size_t s, const Permutation& sigma) {
    if (s < 1) throw UsageError("find_ordered_element: s must be >= 1");
    if (sigma.size() != s || !is_permutation(sigma)) throw UsageError("find_ordered_element: sigma must permute [s]");
    const u64 p = sub.p();
    for (u64 g : sub.elements()) {
        if (g == 1) continue;
        u64 prev = 0;
        bool ordered = true;
        for (std::size_t i = 0; i < s && ordered; ++i) {
            u64 r = pow_mod(g, sigma[i], p);
            ordered = r > prev;
            prev = r;
        }
        if (ordered) return g;
    }
    return std::nullopt;
}

/// floor(delta * sqrt(log p)).
inline std::size_t dimension_scale(u64 p, double delta) {
    if (p < 3) throw UsageError("dimension_scale: p must be >= 3");
    if (!(delta > 0)) throw UsageError("dimension_scale: delta must be positive");
    return static_cast<std::size_t>(std::floor(delta * std::sqrt(std::log(static_cast<double>(p)))));
}

struct DiscrepancyReport {
    u64 p = 0, q = 0, m = 0;
    std::size_t s = 0;
    double etk_bound = 0.0;
    double empirical_lower = 0.0;
    bool covered = false;
    std::size_t missing_count = 0;
    double target = 0.0;         ///< (3s)^-s, the discrepancy that forces full coverage
    double term_inverse_m = 0.0; ///< 1/m
    double term_weil = 0.0;      ///< s p^-0.1687 log^s(m), constant C taken as 1
};

inline DiscrepancyReport discrepancy_report(const SubgroupContext& sub, std::size_t s, u64 m, u64 resolution) {
    PointSet ps = subgroup_point_set(sub, s);
    DiscrepancyReport r;
    r.p = sub.p();
    r.q = sub.q();
    r.s = s;
    r.m = m;
    r.etk_bound = etk_bound(ps, m);
    r.empirical_lower = empirical_grid_discrepancy(ps, resolution);
    CoverageResult cov = grid_box_coverage(ps);
    r.covered = cov.covered;
    r.missing_count = cov.missing.size();
    const double sd = static_cast<double>(s);
    r.target = std::pow(3.0 * sd, -sd);
    r.term_inverse_m = 1.0 / static_cast<double>(m);
    r.term_weil = sd * std::pow(static_cast<double>(r.p), -0.1687) * std::pow(std::log(static_cast<double>(m)), sd);
    return r;
}

/// One row per point: "num/den" exact coordinate then its double, per dimension.
inline void write_point_set_csv(std::ostream& os, const PointSet& ps) {
    for (std::size_t k = 0; k < ps.s; ++k) os << (k ? "," : "") << "x" << k + 1 << "_exact,x" << k + 1;
    os << '\n';
    char buf[64];
    for (std::size_t i = 0; i < ps.size(); ++i) {
        for (std::size_t k = 0; k < ps.s; ++k) {
            if (k) os << ',';
            if (ps.exact()) os << ps.numerators[i][k] << '/' << ps.denominator;
            std::snprintf(buf, sizeof buf, "%.17g", ps.points[i][k]);
            os << ',' << buf;
        }
        os << '\n';
    }
}

} // namespace charmax
