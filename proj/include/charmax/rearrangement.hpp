#pragma once

/**
 * @file rearrangement.hpp
 * @brief Explicit search for orderings sigma of [N] and unit coefficients b
 * that make the additive maximal function max_l |sum_{n<=l} b_n e(sigma(n) x)|
 * large in L2, plus the shift trick that moves a continuous level set onto
 * the grid a/M.
 */

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "charmax/chargroup.hpp"
#include "charmax/delta.hpp"
#include "charmax/errors.hpp"

namespace charmax {

struct BadOrderWitness {
    u64 N = 0;
    u64 M = 0;
    Permutation sigma;
    CoefficientVector b;      ///< unit norm, indices 1..N
    double threshold = 0.0;   ///< c1 * log(N)^(1/4)
    double level_mass = 0.0;  ///< fraction of x in [M] with maximal value > threshold
    double score = 0.0;       ///< sqrt((1/M) sum_x M(x)^2)
    u64 candidates = 0;       ///< permutations evaluated
};

struct RearrangementOptions {
    double c1 = 0.1;
    double c2 = 0.01;
    /// Coefficient optimization for the identity, structured candidates and the final polish.
    AlternatingOptions full{4, 50, {}};
    /// Cheaper optimization for bulk random / swap candidates (warm-started from the incumbent).
    AlternatingOptions screen{0, 10, {1e-7, 1e-3, 100'000}};
};

/// L2 score of (sigma, b) on the grid x in [1, M], recomputed from scratch.
inline double rearrangement_score(const CoefficientVector& b, const Permutation& sigma, u64 M) {
    return additive_max_partial(b, sigma, M).ratio;
}

inline double level_threshold(u64 N, double c1) {
    return N <= 1 ? 0.0 : c1 * std::pow(std::log(static_cast<double>(N)), 0.25);
}

/// Bit-reversal ordering of [N]: positions sorted by the reversed binary digits
/// of n-1 (width ceil(log2 N)). For N a power of two this is the classic
/// dyadic interleaving.
inline Permutation bit_reversal_permutation(std::size_t N) {
    const int width = N <= 1 ? 1 : static_cast<int>(std::bit_width(N - 1));
    std::vector<std::pair<u64, u64>> keyed;
    for (u64 n = 0; n < N; ++n) {
        u64 r = 0;
        for (int b = 0; b < width; ++b)
            if (n >> b & 1) r |= u64{1} << (width - 1 - b);
        keyed.push_back({r, n});
    }
    std::sort(keyed.begin(), keyed.end());
    // sigma(n) = rank of n under the reversed key.
    Permutation sigma(N);
    for (u64 rank = 0; rank < N; ++rank) sigma[keyed[rank].second] = rank + 1;
    return sigma;
}

/// A few structured candidates: bit reversal, its inverse and mirror, and the
/// even/odd interleave.
inline std::vector<Permutation> dyadic_candidates(std::size_t N) {
    std::vector<Permutation> out;
    Permutation br = bit_reversal_permutation(N);
    out.push_back(br);
    Permutation inv(N);
    for (std::size_t i = 0; i < N; ++i) inv[br[i] - 1] = i + 1;
    out.push_back(inv);
    Permutation mirror(N);
    for (std::size_t i = 0; i < N; ++i) mirror[i] = N + 1 - br[i];
    out.push_back(mirror);
    Permutation evens_odds;
    for (std::size_t i = 2; i <= N; i += 2) evens_odds.push_back(i);
    for (std::size_t i = 1; i <= N; i += 2) evens_odds.push_back(i);
    Permutation interleave(N);
    for (std::size_t i = 0; i < N; ++i) interleave[i] = evens_odds[i];
    out.push_back(interleave);
    return out;
}

namespace detail {

inline double factorial_or_inf(std::size_t n) {
    double f = 1.0;
    for (std::size_t k = 2; k <= n; ++k) {
        f *= static_cast<double>(k);
        if (f > 1e18) return std::numeric_limits<double>::infinity();
    }
    return f;
}

} // namespace detail

/// Searches orderings of [N] for a large maximal-function score on x in [M].
/// The identity is always evaluated first; `budget` further candidates follow.
/// When N! <= budget every ordering is tried; otherwise dyadic interleavings,
/// then alternating uniformly random orderings and swap moves from the best.
inline BadOrderWitness search_bad_permutation(u64 N, u64 M, u64 budget, u64 seed,
                                              const RearrangementOptions& opt = {}) {
    if (N < 1) throw UsageError("search_bad_permutation: N must be >= 1");
    if (M < N) throw UsageError("search_bad_permutation: M must be >= N");
    std::mt19937_64 rng(seed);

    Permutation best_sigma = identity_permutation(N);
    std::vector<Complex> best_b;
    double best_score = -1.0;
    u64 evaluated = 0;

    auto evaluate = [&](const Permutation& sigma, const AlternatingOptions& alt, bool with_unit_start) {
        SelectionSystem sys = SelectionSystem::from_additive(sigma, M);
        std::vector<std::vector<Complex>> starts;
        if (!best_b.empty()) starts.push_back(best_b);
        if (with_unit_start) {
            std::vector<Complex> e1(N, Complex{});
            e1[0] = 1.0;
            starts.push_back(e1);
        }
        AlternatingResult r = alternating_maximize(sys, alt, rng, starts);
        ++evaluated;
        if (r.ratio > best_score) {
            best_score = r.ratio;
            best_sigma = sigma;
            best_b = std::move(r.coeffs);
        }
    };

    evaluate(best_sigma, opt.full, true);

    if (N > 1 && budget > 0) {
        u64 used = 0;
        if (detail::factorial_or_inf(N) <= static_cast<double>(budget)) {
            Permutation sigma = identity_permutation(N);
            while (std::next_permutation(sigma.begin(), sigma.end())) {
                evaluate(sigma, opt.full, false);
                ++used;
            }
        } else {
            for (const auto& sigma : dyadic_candidates(N)) {
                if (used >= budget) break;
                evaluate(sigma, opt.full, false);
                ++used;
            }
            std::uniform_int_distribution<std::size_t> pick(0, N - 1);
            for (; used < budget; ++used) {
                Permutation sigma;
                if (used % 2 == 0) {
                    sigma = identity_permutation(N);
                    std::shuffle(sigma.begin(), sigma.end(), rng);
                } else {
                    sigma = best_sigma;
                    std::size_t i = pick(rng), j = pick(rng);
                    if (i == j) j = (j + 1) % N;
                    std::swap(sigma[i], sigma[j]);
                }
                evaluate(sigma, opt.screen, false);
            }
            // Polish the winner at full precision, warm-started from its coefficients.
            evaluate(best_sigma, opt.full, false);
        }
    }

    BadOrderWitness w;
    w.N = N;
    w.M = M;
    w.sigma = best_sigma;
    w.b = CoefficientVector::dense(best_b);
    MaximalReport rep = additive_max_partial(w.b, w.sigma, M);
    w.score = rep.ratio;
    w.threshold = level_threshold(N, opt.c1);
    std::size_t above = 0;
    for (const auto& pm : rep.point_maxima) above += pm.max > w.threshold;
    w.level_mass = static_cast<double>(above) / static_cast<double>(M);
    w.candidates = evaluated;
    return w;
}

/// b'_n = e(sigma(n) tau) b_n.
inline CoefficientVector shift_coefficients(const CoefficientVector& b, const Permutation& sigma, double tau) {
    if (sigma.size() != b.size()) throw UsageError("shift_coefficients: sigma/b size mismatch");
    auto entries = b.entries();
    for (std::size_t j = 0; j < entries.size(); ++j) entries[j].value *= phase(static_cast<double>(sigma[j]) * tau);
    return CoefficientVector(std::move(entries));
}

struct ShiftDiscretization {
    double tau0 = 0.0;
    u64 count = 0;
    std::vector<u64> counts; ///< count at each grid shift tau_j = j / (grid * M)
};

/// For each tau on the grid j / (grid * M), j in [0, grid), counts a in [M] whose
/// shifted maximal value at a/M exceeds `threshold`; returns the first maximizing tau.
inline ShiftDiscretization discretize_via_shift(const CoefficientVector& b, const Permutation& sigma, u64 M, u64 grid,
                                                double threshold) {
    if (grid < 1) throw UsageError("discretize_via_shift: grid must be >= 1");
    if (M < 1) throw UsageError("discretize_via_shift: M must be >= 1");
    ShiftDiscretization out;
    out.counts.reserve(grid);
    bool first = true;
    for (u64 j = 0; j < grid; ++j) {
        const double tau = static_cast<double>(j) / (static_cast<double>(grid) * static_cast<double>(M));
        MaximalReport rep = additive_max_partial(shift_coefficients(b, sigma, tau), sigma, M);
        u64 c = 0;
        for (const auto& pm : rep.point_maxima) c += pm.max > threshold;
        out.counts.push_back(c);
        if (first || c > out.count) {
            out.count = c;
            out.tau0 = tau;
            first = false;
        }
    }
    return out;
}

} // namespace charmax
