#pragma once

/**
 * @file numtheory.hpp
 * @brief Integer substrate: primality, factorization, primitive roots,
 * discrete-log tables for Z_p^*, subgroups of prime order, and the scan for
 * primes p whose p-1 carries a large prime factor.
 *
 * Everything here is exact integer arithmetic. Discrete logs use full tables,
 * so a GroupContext costs O(p) memory; the table budget is kMaxTableModulus.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "charmax/errors.hpp"

namespace charmax {

using u64 = std::uint64_t;
using i64 = std::int64_t;

inline constexpr u64 kMaxTableModulus = 10'000'000;

// =============================================================================
// Modular arithmetic
// =============================================================================

constexpr u64 mul_mod(u64 a, u64 b, u64 m) {
    return static_cast<u64>((static_cast<unsigned __int128>(a) * b) % m);
}

constexpr u64 pow_mod(u64 base, u64 exp, u64 m) {
    if (m == 1) return 0;
    u64 result = 1;
    base %= m;
    while (exp > 0) {
        if (exp & 1) result = mul_mod(result, base, m);
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    return result;
}

/// Deterministic Miller-Rabin; the first twelve prime bases cover all of u64.
constexpr bool is_prime(u64 n) {
    if (n < 2) return false;
    constexpr u64 bases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (u64 b : bases) {
        if (n % b == 0) return n == b;
    }
    u64 d = n - 1;
    int r = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++r;
    }
    for (u64 a : bases) {
        u64 x = pow_mod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < r; ++i) {
            x = mul_mod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

/// Prime factors with multiplicity, ascending. factorize(1) is empty.
inline std::vector<u64> factorize(u64 n) {
    if (n == 0) throw UsageError("factorize: n must be >= 1");
    std::vector<u64> factors;
    while ((n & 1) == 0) {
        factors.push_back(2);
        n >>= 1;
    }
    for (u64 d = 3; d <= n / d; d += 2) {
        while (n % d == 0) {
            factors.push_back(d);
            n /= d;
        }
    }
    if (n > 1) factors.push_back(n);
    return factors;
}

inline std::vector<u64> distinct_prime_factors(u64 n) {
    auto f = factorize(n);
    f.erase(std::unique(f.begin(), f.end()), f.end());
    return f;
}

inline u64 largest_prime_factor(u64 n) {
    if (n < 2) throw UsageError("largest_prime_factor: n must be >= 2");
    return factorize(n).back();
}

inline u64 euler_phi(u64 n) {
    if (n == 0) throw UsageError("euler_phi: n must be >= 1");
    u64 phi = n;
    for (u64 r : distinct_prime_factors(n)) phi = phi / r * (r - 1);
    return phi;
}

/// Multiplicative order of a modulo m (gcd(a, m) = 1 required).
inline u64 multiplicative_order(u64 a, u64 m) {
    if (m < 2 || std::gcd(a % m, m) != 1)
        throw UsageError("multiplicative_order: a must be a unit mod m");
    // Strip prime factors from phi(m) while a^(ord/r) == 1.
    u64 ord = euler_phi(m);
    for (u64 r : distinct_prime_factors(ord)) {
        while (ord % r == 0 && pow_mod(a, ord / r, m) == 1) ord /= r;
    }
    return ord;
}

/// Smallest generator of Z_p^*. For p = 2 the group is trivial and 1 is returned.
inline u64 primitive_root(u64 p) {
    if (!is_prime(p)) throw UsageError("primitive_root: " + std::to_string(p) + " is not prime");
    if (p == 2) return 1;
    const auto prime_divisors = distinct_prime_factors(p - 1);
    for (u64 g = 2; g < p; ++g) {
        bool generates = std::all_of(prime_divisors.begin(), prime_divisors.end(),
                                     [&](u64 r) { return pow_mod(g, (p - 1) / r, p) != 1; });
        if (generates) return g;
    }
    throw UsageError("primitive_root: no generator found"); // unreachable for prime p
}

// =============================================================================
// Large-prime-factor scan
// =============================================================================

/// A positive rational num/den; used to compare q >= B * p^e without float ties.
struct Rational {
    u64 num = 1;
    u64 den = 1;

    /// Rounds x to `digits` decimal places, then reduces. 0.6687 -> 6687/10000.
    static Rational from_decimal(double x, int digits = 6) {
        if (!(x > 0)) throw UsageError("Rational::from_decimal: value must be positive");
        u64 den = 1;
        for (int i = 0; i < digits; ++i) den *= 10;
        auto num = static_cast<u64>(std::llround(x * static_cast<double>(den)));
        if (num == 0) throw UsageError("Rational::from_decimal: value rounds to zero");
        u64 g = std::gcd(num, den);
        return {num / g, den / g};
    }

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

struct PrimePair {
    u64 p = 0;
    u64 q = 0;
    double ratio_exponent = 0.0; ///< log q / log p
};

/// Exact test of q >= B * p^e, i.e. (q * B.den)^e.den >= B.num^e.den * p^e.num.
inline bool exceeds_power_exact(u64 q, u64 p, Rational B, Rational e) {
    auto ed = static_cast<unsigned long>(e.den);
    auto en = static_cast<unsigned long>(e.num);
    mpz_class lhs, rhs, t;
    mpz_ui_pow_ui(lhs.get_mpz_t(), static_cast<unsigned long>(q), ed);
    if (B.den != 1) {
        mpz_ui_pow_ui(t.get_mpz_t(), static_cast<unsigned long>(B.den), ed);
        lhs *= t;
    }
    mpz_ui_pow_ui(rhs.get_mpz_t(), static_cast<unsigned long>(p), en);
    if (B.num != 1) {
        mpz_ui_pow_ui(t.get_mpz_t(), static_cast<unsigned long>(B.num), ed);
        rhs *= t;
    }
    return lhs >= rhs;
}

/// q >= B * p^e, decided in log space unless the two sides are within 1e-9,
/// in which case the exact big-integer comparison settles it.
inline bool exceeds_power(u64 q, u64 p, Rational B, Rational e) {
    const double lhs = std::log(static_cast<double>(q));
    const double rhs = std::log(B.value()) + e.value() * std::log(static_cast<double>(p));
    if (std::abs(lhs - rhs) > 1e-9 * (1.0 + std::abs(rhs))) return lhs > rhs;
    return exceeds_power_exact(q, p, B, e);
}

/// Every prime 3 <= p <= limit with P(p-1) >= B p^exponent, sorted by p.
inline std::vector<PrimePair> scan_fouvry_primes(u64 limit, double B, double exponent) {
    if (limit < 3) return {};
    if (!(exponent > 0 && exponent < 1)) throw UsageError("scan_fouvry_primes: exponent must lie in (0,1)");
    if (!(B > 0)) throw UsageError("scan_fouvry_primes: B must be positive");
    if (limit > kMaxTableModulus * 10) throw BudgetError("scan_fouvry_primes: limit exceeds sieve budget");
    const Rational Br = Rational::from_decimal(B);
    const Rational er = Rational::from_decimal(exponent);

    // Largest-prime-factor sieve over [0, limit].
    std::vector<std::uint32_t> lpf(limit + 1, 0);
    for (u64 i = 2; i <= limit; ++i) {
        if (lpf[i] != 0) continue;
        for (u64 j = i; j <= limit; j += i) lpf[j] = static_cast<std::uint32_t>(i);
    }
    std::vector<PrimePair> out;
    for (u64 p = 3; p <= limit; ++p) {
        if (lpf[p] != p) continue;
        const u64 q = lpf[p - 1];
        if (exceeds_power(q, p, Br, er)) {
            out.push_back({p, q, std::log(static_cast<double>(q)) / std::log(static_cast<double>(p))});
        }
    }
    return out;
}

// =============================================================================
// Group contexts
// =============================================================================

/// Z_p^* with a fixed primitive root alpha and the full index table
/// nu(g) in [1, p-1], alpha^nu(g) = g. Note nu(1) = p-1, not 0.
class GroupContext {
public:
    explicit GroupContext(u64 p) : p_(p) {
        if (!is_prime(p)) throw UsageError("GroupContext: " + std::to_string(p) + " is not prime");
        if (p > kMaxTableModulus)
            throw BudgetError("GroupContext: p = " + std::to_string(p) + " exceeds table budget " +
                              std::to_string(kMaxTableModulus));
        alpha_ = primitive_root(p);
        nu_.assign(p, 0);
        power_.assign(p, 0);
        u64 x = 1;
        for (u64 k = 1; k <= p - 1; ++k) {
            x = mul_mod(x, alpha_, p);
            nu_[x] = static_cast<std::uint32_t>(k);
            power_[k] = static_cast<std::uint32_t>(x);
        }
        power_[0] = 1;
    }

    u64 p() const { return p_; }
    u64 order() const { return p_ - 1; }
    u64 alpha() const { return alpha_; }

    /// Index of g in [1, p-1]; g is reduced mod p and must be nonzero.
    u64 nu(u64 g) const {
        g %= p_;
        if (g == 0) throw UsageError("GroupContext::nu: 0 is not a unit");
        return nu_[g];
    }

    /// alpha^k mod p for any k >= 0.
    u64 power(u64 k) const { return power_[k % (p_ - 1)]; }

private:
    u64 p_;
    u64 alpha_ = 1;
    std::vector<std::uint32_t> nu_;    // indexed by residue
    std::vector<std::uint32_t> power_; // indexed by exponent in [0, p-1)
};

/// The order-q subgroup A of Z_p^*, elements in increasing integer order,
/// with its own generator (smallest non-identity element) and index nu_A in [1, q].
class SubgroupContext {
public:
    SubgroupContext(std::shared_ptr<const GroupContext> parent, u64 q) : parent_(std::move(parent)), q_(q) {
        const u64 p = parent_->p();
        if (!is_prime(q) || (p - 1) % q != 0)
            throw UsageError("SubgroupContext: q = " + std::to_string(q) + " must be a prime dividing p-1 = " +
                             std::to_string(p - 1));
        const u64 cofactor = (p - 1) / q;
        std::vector<bool> seen(p, false);
        for (u64 x = 1; x < p; ++x) {
            u64 y = pow_mod(x, cofactor, p);
            if (!seen[y]) {
                seen[y] = true;
                elements_.push_back(y);
            }
        }
        std::sort(elements_.begin(), elements_.end());
        if (elements_.size() != q) throw UsageError("SubgroupContext: image has unexpected size");

        position_.assign(p, 0);
        for (std::size_t i = 0; i < elements_.size(); ++i) position_[elements_[i]] = static_cast<std::uint32_t>(i + 1);

        alpha_ = (q == 1) ? 1 : elements_[1]; // elements_[0] == 1
        nu_.assign(p, 0);
        u64 x = 1;
        for (u64 k = 1; k <= q; ++k) {
            x = mul_mod(x, alpha_, p);
            nu_[x] = static_cast<std::uint32_t>(k);
        }
    }

    const GroupContext& parent() const { return *parent_; }
    std::shared_ptr<const GroupContext> parent_ptr() const { return parent_; }
    u64 p() const { return parent_->p(); }
    u64 q() const { return q_; }
    u64 alpha() const { return alpha_; }
    const std::vector<u64>& elements() const { return elements_; }

    bool contains(u64 g) const { return g % p() != 0 && position_[g % p()] != 0; }

    /// 1-based position of g within the sorted element list.
    u64 position(u64 g) const {
        if (!contains(g)) throw UsageError("SubgroupContext::position: element not in subgroup");
        return position_[g % p()];
    }

    /// Internal index nu_A(g) in [1, q].
    u64 nu(u64 g) const {
        if (!contains(g)) throw UsageError("SubgroupContext::nu: element not in subgroup");
        return nu_[g % p()];
    }

private:
    std::shared_ptr<const GroupContext> parent_;
    u64 q_;
    u64 alpha_ = 1;
    std::vector<u64> elements_;
    std::vector<std::uint32_t> position_;
    std::vector<std::uint32_t> nu_;
};

inline std::shared_ptr<const GroupContext> build_group_context(u64 p) {
    return std::make_shared<const GroupContext>(p);
}

inline std::shared_ptr<const SubgroupContext> build_subgroup_context(std::shared_ptr<const GroupContext> ctx, u64 q) {
    return std::make_shared<const SubgroupContext>(std::move(ctx), q);
}

} // namespace charmax
