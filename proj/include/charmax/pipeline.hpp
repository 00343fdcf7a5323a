#pragma once

/**
 * @file pipeline.hpp
 * @brief End-to-end constructions that tie the modules together.
 *
 * build_counterexample: for a prime p with a large prime q | p-1, place a bad
 * additive ordering (sigma, b) of length s on the subgroup A of order q via an
 * element g whose powers g^sigma(1) < ... < g^sigma(s) appear in increasing
 * order, then verify step by step that the multiplicative maximal quantity
 * equals the additive one on Z_q:
 *
 *   multiplicative over chi mod p
 *     = additive over x in [q] with frequencies nu_A(g_n)        (restriction to A)
 *     = additive with frequencies sigma(m) nu_A(g)               (nu_A(g^i) = i nu_A(g) mod q)
 *     = additive with frequencies sigma(m)                       (y = x nu_A(g) mod q)
 *
 * verify_ch_reduction: the opposite direction. Coefficients attached to
 * chi(2^i) turn the multiplicative quantity into the additive one on Z_M with
 * M the order of 2 mod p, through four independently computed forms.
 */

#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "charmax/chargroup.hpp"
#include "charmax/delta.hpp"
#include "charmax/discrepancy.hpp"
#include "charmax/errors.hpp"
#include "charmax/numtheory.hpp"
#include "charmax/rearrangement.hpp"

namespace charmax {

struct IdentityCheck {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double abs_error = 0.0;

    bool holds(double tol = 1e-9) const { return abs_error <= tol * (1.0 + std::abs(lhs)); }
};

inline IdentityCheck make_identity(std::string name, double lhs, double rhs) {
    return {std::move(name), lhs, rhs, std::abs(lhs - rhs)};
}

struct CounterexampleConfig {
    u64 seed = 0;
    double delta_param = 1.0;    ///< s = floor(delta sqrt(log p)), then capped
    std::size_t s_cap = 8;
    std::optional<std::size_t> s_override;
    u64 search_budget = 2000;
    RearrangementOptions rearrangement{};
};

struct CounterexampleReport {
    u64 p = 0, q = 0;
    std::size_t s = 0;
    std::vector<std::size_t> s_attempted;
    Permutation sigma;
    CoefficientVector b;           ///< length s, unit norm
    u64 g = 0;                     ///< ordered element of A
    u64 nu_A_g = 0;
    std::vector<u64> support;      ///< residues g^sigma(1) < ... < g^sigma(s)
    CoefficientVector assembled;   ///< the coefficient vector on Z_p^*
    std::vector<IdentityCheck> identities;
    bool nu_linearity = false;     ///< nu_A(g^i) = i nu_A(g) mod q for i <= s
    double search_score = 0.0;
    double level_mass = 0.0;
    double delta_lower_bound = 0.0;
    double delta_ratio_check = 0.0; ///< independent re-evaluation through the character table
    double rm_ceiling = 0.0;
    double reference_scale = 0.0;   ///< (log log p)^(1/4)

    bool identities_hold(double tol = 1e-9) const {
        for (const auto& id : identities)
            if (!id.holds(tol)) return false;
        return nu_linearity;
    }
};

/// Places b_m at residue g^sigma(m) and runs the full identity chain.
inline CounterexampleReport assemble_counterexample(const SubgroupContext& sub, const Permutation& sigma,
                                                    const CoefficientVector& b, u64 g) {
    const std::size_t s = sigma.size();
    if (b.size() != s || !is_permutation(sigma)) throw UsageError("assemble_counterexample: sigma/b mismatch");
    if (!sub.contains(g) || g == 1) throw UsageError("assemble_counterexample: g must be a non-identity element of A");
    const u64 p = sub.p(), q = sub.q();
    const GroupContext& ctx = sub.parent();

    CounterexampleReport rep;
    rep.p = p;
    rep.q = q;
    rep.s = s;
    rep.sigma = sigma;
    rep.b = b;
    rep.g = g;
    rep.nu_A_g = sub.nu(g);

    std::vector<CoefficientEntry> residue_entries, position_entries;
    u64 prev = 0;
    for (std::size_t m = 0; m < s; ++m) {
        const u64 r = pow_mod(g, sigma[m], p);
        if (r <= prev) throw UsageError("assemble_counterexample: powers of g are not in increasing order under sigma");
        prev = r;
        rep.support.push_back(r);
        residue_entries.push_back({r, b[m].value});
        position_entries.push_back({sub.position(r), b[m].value});
    }
    rep.assembled = CoefficientVector(std::move(residue_entries));
    const CoefficientVector positional(std::move(position_entries));

    rep.nu_linearity = true;
    for (u64 i = 1; i <= s; ++i) {
        if (sub.nu(pow_mod(g, i, p)) % q != mul_mod(i, rep.nu_A_g, q)) rep.nu_linearity = false;
    }
    if (std::gcd(rep.nu_A_g % q, q) != 1) rep.nu_linearity = false;

    // Multiplicative side, natural residue order over all characters mod p.
    const double multiplicative = multiplicative_max_partial(ctx, rep.assembled).l2_average;
    // Restriction to A: both sides over A's positional enumeration.
    const TransportValues transport = transport_subgroup_to_additive(sub, positional);
    // nu-linearity form: frequencies sigma(m) nu_A(g) mod q.
    std::vector<u64> lin_freq(s);
    for (std::size_t m = 0; m < s; ++m) lin_freq[m] = mul_mod(sigma[m], rep.nu_A_g, q);
    const double linear = frequency_max_partial(b, lin_freq, q, q).l2_average;
    // After the change of variables: the plain ordered additive system.
    const double additive = additive_max_partial(b, sigma, q).l2_average;

    rep.identities.push_back(make_identity("subgroup_positions", multiplicative, std::sqrt(transport.lhs)));
    rep.identities.push_back(make_identity("transport", std::sqrt(transport.lhs), std::sqrt(transport.rhs)));
    rep.identities.push_back(make_identity("nu_linearity", std::sqrt(transport.rhs), linear));
    rep.identities.push_back(make_identity("change_of_variables", linear, additive));

    rep.delta_lower_bound = multiplicative / rep.assembled.norm();
    rep.delta_ratio_check = delta_ratio(p, rep.assembled);
    rep.rm_ceiling = rm_upper_bound(p).value;
    rep.reference_scale = std::pow(std::log(std::log(static_cast<double>(p))), 0.25);
    rep.search_score = additive / b.norm();
    return rep;
}

/// Full construction for a prime pair (p, q). s comes from the configured scale,
/// capped; if no ordered element exists at s, s is lowered one step at a time
/// down to 2 before giving up.
inline CounterexampleReport build_counterexample(const PrimePair& pair, const CounterexampleConfig& cfg = {}) {
    if (!is_prime(pair.p)) throw UsageError("build_counterexample: p is not prime");
    if (!is_prime(pair.q) || (pair.p - 1) % pair.q != 0)
        throw UsageError("build_counterexample: q must be a prime divisor of p-1");
    auto ctx = build_group_context(pair.p);
    auto sub = build_subgroup_context(ctx, pair.q);

    std::size_t s = cfg.s_override ? *cfg.s_override : std::min(dimension_scale(pair.p, cfg.delta_param), cfg.s_cap);
    s = std::max<std::size_t>(1, std::min<std::size_t>(s, pair.q));

    std::vector<std::size_t> attempted;
    for (;;) {
        attempted.push_back(s);
        BadOrderWitness w = search_bad_permutation(s, pair.q, cfg.search_budget, cfg.seed, cfg.rearrangement);
        std::optional<u64> g = find_ordered_element(*sub, s, w.sigma);
        if (g) {
            CounterexampleReport rep = assemble_counterexample(*sub, w.sigma, w.b, *g);
            rep.s_attempted = std::move(attempted);
            rep.level_mass = w.level_mass;
            return rep;
        }
        if (s <= 2)
            throw NotFoundError("build_counterexample: no element of A orders its powers as required for p=" +
                                std::to_string(pair.p) + " q=" + std::to_string(pair.q) + " at any s >= 2");
        --s;
    }
}

struct ReductionReport {
    u64 p = 0;
    std::size_t k = 0;
    u64 nu2 = 0;
    u64 L = 0, M = 0;
    u64 order_of_two = 0;
    double chain_values[4] = {0, 0, 0, 0}; ///< L2 averages: characters, nu(2) phases, L/M phases, plain Z_M
    bool m_divides = false;
    bool coprime = false;
    bool m_exceeds_log = false;  ///< 2^M > p, exactly
    bool m_is_order = false;
    bool relabel_multiset = false; ///< per-point maxima of the L/M and plain forms agree after y = Lx mod M
    double max_relative_gap = 0.0;

    bool holds(double tol = 1e-9) const {
        return max_relative_gap <= tol && m_divides && coprime && m_exceeds_log && m_is_order && relabel_multiset;
    }
};

/// Four forms of the maximal quantity for coefficients a_i attached to chi(2^i),
/// i = 1..k, each computed by separate code.
inline ReductionReport verify_ch_reduction(u64 p, const CoefficientVector& a) {
    const std::size_t k = a.size();
    if (k == 0 || a.norm() == 0.0) throw UsageError("verify_ch_reduction: coefficients must be nonzero");
    if (k >= 63 || (u64{1} << k) >= p) throw UsageError("verify_ch_reduction: requires 2^k < p");
    for (std::size_t i = 0; i < k; ++i)
        if (a[i].index != i + 1) throw UsageError("verify_ch_reduction: coefficients must be indexed 1..k");
    const GroupContext ctx(p);
    const u64 order = ctx.order();

    ReductionReport rep;
    rep.p = p;
    rep.k = k;
    rep.nu2 = ctx.nu(2);
    const u64 d = std::gcd(rep.nu2, order);
    rep.L = rep.nu2 / d;
    rep.M = order / d;
    rep.m_divides = order % rep.M == 0;
    rep.coprime = std::gcd(rep.L, rep.M) == 1;
    rep.m_exceeds_log = rep.M >= 64 || (u64{1} << rep.M) > p;
    rep.order_of_two = multiplicative_order(2, p);
    rep.m_is_order = rep.order_of_two == rep.M;

    // Characters evaluated at the actual residues 2^i mod p.
    {
        std::vector<u64> residues(k);
        u64 r = 1;
        for (std::size_t i = 0; i < k; ++i) residues[i] = r = mul_mod(r, 2, p);
        double total = 0.0;
        for (u64 c = 0; c < order; ++c) {
            double m = detail::prefix_sweep(a, [&](std::size_t i) { return a[i].value * eval_character(ctx, c, residues[i]); }).first;
            total += m * m;
        }
        rep.chain_values[0] = std::sqrt(total / static_cast<double>(order));
    }
    // Phases i nu(2) x / (p-1), x in [p-1].
    std::vector<u64> f7(k), f8(k), f9(k);
    for (std::size_t i = 0; i < k; ++i) {
        f7[i] = mul_mod(i + 1, rep.nu2, order);
        f8[i] = mul_mod(i + 1, rep.L, rep.M);
        f9[i] = (i + 1) % rep.M;
    }
    rep.chain_values[1] = frequency_max_partial(a, f7, order, order).l2_average;
    // Phases i L x / M, still averaged over x in [p-1].
    rep.chain_values[2] = frequency_max_partial(a, f8, rep.M, order).l2_average;
    // Plain additive system on Z_M.
    const MaximalReport plain = frequency_max_partial(a, f9, rep.M, rep.M);
    rep.chain_values[3] = plain.l2_average;

    double gap = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            double scale = std::max(std::abs(rep.chain_values[i]), std::abs(rep.chain_values[j]));
            gap = std::max(gap, std::abs(rep.chain_values[i] - rep.chain_values[j]) / (scale > 0 ? scale : 1.0));
        }
    rep.max_relative_gap = gap;

    // One period of the L/M form, relabeled, is a permutation of the plain form.
    const MaximalReport period = frequency_max_partial(a, f8, rep.M, rep.M);
    std::vector<double> lhs, rhs;
    for (const auto& pm : period.point_maxima) lhs.push_back(pm.max);
    for (const auto& pm : plain.point_maxima) rhs.push_back(pm.max);
    std::sort(lhs.begin(), lhs.end());
    std::sort(rhs.begin(), rhs.end());
    rep.relabel_multiset = lhs.size() == rhs.size();
    for (std::size_t i = 0; rep.relabel_multiset && i < lhs.size(); ++i)
        rep.relabel_multiset = std::abs(lhs[i] - rhs[i]) <= 1e-12 * (1.0 + rhs[i]);
    return rep;
}

struct GrowthRow {
    u64 p = 0, q = 0;
    std::size_t s = 0;
    double delta_lower_bound = 0.0;
    double reference_scale = 0.0;
    double runtime_ms = 0.0;
};

/// build_counterexample over every large-factor prime up to `limit`, in order of p.
inline std::vector<GrowthRow> growth_series(u64 limit, double B, double exponent, const CounterexampleConfig& cfg = {}) {
    std::vector<GrowthRow> rows;
    for (const PrimePair& pair : scan_fouvry_primes(limit, B, exponent)) {
        auto t0 = std::chrono::steady_clock::now();
        CounterexampleReport rep = build_counterexample(pair, cfg);
        auto t1 = std::chrono::steady_clock::now();
        rows.push_back({pair.p, pair.q, rep.s, rep.delta_lower_bound, rep.reference_scale,
                        std::chrono::duration<double, std::milli>(t1 - t0).count()});
    }
    return rows;
}

} // namespace charmax
