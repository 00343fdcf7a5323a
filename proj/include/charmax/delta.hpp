#pragma once

/**
 * @file delta.hpp
 * @brief Estimating the best constant Delta(N) in the L2 maximal inequality
 * over all Dirichlet characters mod N.
 *
 * The maximal operator is linearized by a cutoff assignment: each character
 * picks one prefix length. For a fixed assignment the operator is a selection
 * matrix S (row chi holds chi(n) for the first l(chi) units, zero beyond), and
 *
 *     Delta(N) = max over assignments of sigma_max(S) / sqrt(phi(N)).
 *
 * Small N are solved by exhausting assignments; larger N get a lower bound from
 * alternating maximization. The Rademacher-Menshov dyadic chaining gives the
 * ceiling ceil(log2 phi(N)) + 1.
 */

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "charmax/chargroup.hpp"
#include "charmax/errors.hpp"
#include "charmax/numtheory.hpp"

namespace charmax {

// =============================================================================
// Dirichlet characters mod N
// =============================================================================

/// All phi(N) characters of Z_N^*, with values chi_c(u_j) = e(k / phi(N)).
/// Prime moduli go through the primitive-root index; composite moduli are
/// handled by brute-force homomorphism enumeration (small phi only).
class DirichletGroup {
public:
    static constexpr u64 kMaxCompositeAssignments = 1'000'000;

    explicit DirichletGroup(u64 N) : N_(N) {
        if (N < 1) throw UsageError("DirichletGroup: modulus must be >= 1");
        for (u64 n = 1; n <= std::max<u64>(N - 1, 1); ++n) {
            if (std::gcd(n, N) == 1) units_.push_back(n);
        }
        phi_ = units_.size();
        position_.assign(N + 1, 0);
        for (std::size_t j = 0; j < units_.size(); ++j) position_[units_[j]] = j + 1;

        if (is_prime(N) && N > 2) {
            prime_ = std::make_shared<const GroupContext>(N);
            logs_.resize(phi_);
            for (std::size_t j = 0; j < phi_; ++j) logs_[j] = prime_->nu(units_[j]) % phi_;
        } else {
            build_composite();
        }
    }

    u64 modulus() const { return N_; }
    u64 phi() const { return phi_; }
    const std::vector<u64>& units() const { return units_; }

    /// 1-based position of unit n in the increasing unit list; 0 if n is not a unit.
    u64 position(u64 n) const { return n <= N_ ? position_[n] : 0; }

    /// k with chi_c(units[j]) = e(k / phi).
    u64 exponent(u64 c, std::size_t j) const {
        if (prime_) return mul_mod(c, logs_[j], phi_);
        return table_[c * phi_ + j];
    }

    Complex value(u64 c, std::size_t j) const { return unit_root(static_cast<i64>(exponent(c, j)), phi_); }

private:
    void build_composite() {
        // Greedy generating set of Z_N^*.
        std::vector<u64> gens;
        std::set<u64> span{1 % N_};
        for (u64 u : units_) {
            if (span.count(u)) continue;
            gens.push_back(u);
            std::vector<u64> frontier(span.begin(), span.end());
            while (!frontier.empty()) {
                std::vector<u64> next;
                for (u64 x : frontier) {
                    for (u64 g : gens) {
                        u64 y = mul_mod(x, g, N_);
                        if (span.insert(y).second) next.push_back(y);
                    }
                }
                frontier = std::move(next);
            }
        }
        double combos = std::pow(static_cast<double>(phi_), static_cast<double>(gens.size()));
        if (combos > static_cast<double>(kMaxCompositeAssignments))
            throw BudgetError("DirichletGroup: composite modulus too large for homomorphism enumeration");

        // Try every assignment of phi-th roots of unity to the generators and keep
        // those that extend to a well-defined homomorphism.
        std::vector<std::vector<u64>> found;
        std::vector<u64> gen_val(gens.size(), 0);
        const u64 total = static_cast<u64>(combos);
        for (u64 code = 0; code < total; ++code) {
            u64 c = code;
            for (std::size_t i = 0; i < gens.size(); ++i) {
                gen_val[i] = c % phi_;
                c /= phi_;
            }
            std::vector<i64> val(N_, -1);
            val[1 % N_] = 0;
            std::vector<u64> frontier{1 % N_};
            bool ok = true;
            while (ok && !frontier.empty()) {
                std::vector<u64> next;
                for (u64 x : frontier) {
                    for (std::size_t i = 0; i < gens.size() && ok; ++i) {
                        u64 y = mul_mod(x, gens[i], N_);
                        i64 v = static_cast<i64>((static_cast<u64>(val[x]) + gen_val[i]) % phi_);
                        if (val[y] < 0) {
                            val[y] = v;
                            next.push_back(y);
                        } else if (val[y] != v) {
                            ok = false;
                        }
                    }
                }
                frontier = std::move(next);
            }
            if (!ok) continue;
            std::vector<u64> row(phi_);
            for (std::size_t j = 0; j < phi_; ++j) row[j] = static_cast<u64>(val[units_[j] % N_]);
            found.push_back(std::move(row));
        }
        if (found.size() != phi_) throw std::logic_error("DirichletGroup: character count mismatch");
        std::sort(found.begin(), found.end());
        table_.reserve(phi_ * phi_);
        for (const auto& row : found) table_.insert(table_.end(), row.begin(), row.end());
    }

    u64 N_;
    u64 phi_ = 0;
    std::vector<u64> units_;
    std::vector<u64> position_;
    std::shared_ptr<const GroupContext> prime_;
    std::vector<u64> logs_;
    std::vector<u64> table_; // composite case, row-major [character][unit]
};

// =============================================================================
// Selection systems and the linearized operator
// =============================================================================

/// Per-row prefix length in [1, cols].
using CutoffAssignment = std::vector<u64>;

/// A rows x cols phase matrix; row r, column j holds the j-th summand's phase at
/// evaluation point r. The quantity of interest is
///     weight * sum_r max_l |sum_{j<l} Phi[r][j] a_j|^2.
class SelectionSystem {
public:
    static constexpr std::size_t kMaxEntries = 40'000'000;

    SelectionSystem(std::size_t rows, std::size_t cols, double weight)
        : rows_(rows), cols_(cols), weight_(weight) {
        if (rows == 0 || cols == 0) throw UsageError("SelectionSystem: empty system");
        if (rows * cols > kMaxEntries) throw BudgetError("SelectionSystem: phase matrix exceeds budget");
        phases_.resize(rows * cols);
    }

    static SelectionSystem from_characters(const DirichletGroup& G) {
        SelectionSystem sys(G.phi(), G.phi(), 1.0 / static_cast<double>(G.phi()));
        for (u64 c = 0; c < G.phi(); ++c)
            for (std::size_t j = 0; j < G.phi(); ++j) sys.at(c, j) = G.value(c, j);
        return sys;
    }

    /// Rows x in [1, M], columns n in [1, N]: Phi[x][n] = e(sigma(n) x / M).
    static SelectionSystem from_additive(const Permutation& sigma, u64 M) {
        SelectionSystem sys(M, sigma.size(), 1.0 / static_cast<double>(M));
        RootTable roots(M);
        for (u64 x = 1; x <= M; ++x)
            for (std::size_t j = 0; j < sigma.size(); ++j) sys.at(x - 1, j) = roots[mul_mod(sigma[j] % M, x, M)];
        return sys;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double weight() const { return weight_; }
    Complex& at(std::size_t r, std::size_t c) { return phases_[r * cols_ + c]; }
    const Complex& at(std::size_t r, std::size_t c) const { return phases_[r * cols_ + c]; }

    /// Argmax prefix per row (smallest l on ties) and the resulting objective
    /// weight * sum_r max_l |.|^2.
    std::pair<CutoffAssignment, double> best_cutoffs(const std::vector<Complex>& a) const {
        CutoffAssignment assign(rows_);
        double total = 0.0;
        for (std::size_t r = 0; r < rows_; ++r) {
            const Complex* row = &phases_[r * cols_];
            Complex run{};
            double best = -1.0;
            u64 arg = 1;
            for (std::size_t j = 0; j < cols_; ++j) {
                run += row[j] * a[j];
                double m = std::norm(run);
                if (m > best) {
                    best = m;
                    arg = j + 1;
                }
            }
            assign[r] = arg;
            total += best;
        }
        return {std::move(assign), weight_ * total};
    }

    /// weight * ||S_assign a||^2.
    double linear_objective(const CutoffAssignment& assign, const std::vector<Complex>& a) const {
        double total = 0.0;
        for (std::size_t r = 0; r < rows_; ++r) total += std::norm(row_dot(r, assign[r], a));
        return weight_ * total;
    }

    /// y = S^H S v for the given assignment.
    void gram_apply(const CutoffAssignment& assign, const std::vector<Complex>& v, std::vector<Complex>& y) const {
        y.assign(cols_, Complex{});
        for (std::size_t r = 0; r < rows_; ++r) {
            const Complex s = row_dot(r, assign[r], v);
            const Complex* row = &phases_[r * cols_];
            for (std::size_t j = 0; j < assign[r]; ++j) y[j] += std::conj(row[j]) * s;
        }
    }

private:
    Complex row_dot(std::size_t r, u64 len, const std::vector<Complex>& v) const {
        const Complex* row = &phases_[r * cols_];
        Complex s{};
        for (std::size_t j = 0; j < len; ++j) s += row[j] * v[j];
        return s;
    }

    std::size_t rows_, cols_;
    double weight_;
    std::vector<Complex> phases_;
};

inline double vector_norm(const std::vector<Complex>& v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s);
}

inline void normalize_in_place(std::vector<Complex>& v) {
    double n = vector_norm(v);
    if (n == 0.0) throw UsageError("normalize: zero vector");
    for (auto& z : v) z /= n;
}

/// Rotates v so its first non-negligible entry is real and positive.
inline void fix_global_phase(std::vector<Complex>& v) {
    for (const auto& z : v) {
        if (std::abs(z) > 1e-12) {
            Complex rot = std::conj(z) / std::abs(z);
            for (auto& w : v) w *= rot;
            return;
        }
    }
}

/// Random unit vector with i.i.d. complex Gaussian entries.
inline std::vector<Complex> random_unit_vector(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Complex> v(n);
    do {
        for (auto& z : v) z = {gauss(rng), gauss(rng)};
    } while (vector_norm(v) == 0.0);
    normalize_in_place(v);
    return v;
}

struct PowerIterationOptions {
    double tolerance = 1e-10;      ///< relative change of the Rayleigh quotient
    double residual = 1e-7;        ///< relative residual ||Gv - lambda v|| / lambda
    std::size_t max_iterations = 100'000;
};

struct TopSingular {
    double lambda = 0.0;           ///< largest eigenvalue of S^H S
    std::vector<Complex> vector;   ///< unit top right-singular vector
    std::size_t iterations = 0;
};

/// Power iteration on the Hermitian Gram matrix S^H S of one assignment.
inline TopSingular top_singular(const SelectionSystem& sys, const CutoffAssignment& assign,
                                std::vector<Complex> start, const PowerIterationOptions& opt = {}) {
    normalize_in_place(start);
    std::vector<Complex> v = std::move(start), y;
    sys.gram_apply(assign, v, y);
    double lambda = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) lambda += std::real(std::conj(v[j]) * y[j]);
    for (std::size_t it = 1; it <= opt.max_iterations; ++it) {
        double ny = vector_norm(y);
        if (ny == 0.0) return {0.0, v, it}; // S v = 0 and v is the iterate; operator is zero here
        for (std::size_t j = 0; j < v.size(); ++j) v[j] = y[j] / ny;
        sys.gram_apply(assign, v, y);
        double next = 0.0;
        for (std::size_t j = 0; j < v.size(); ++j) next += std::real(std::conj(v[j]) * y[j]);
        double res = 0.0;
        for (std::size_t j = 0; j < v.size(); ++j) res += std::norm(y[j] - next * v[j]);
        res = std::sqrt(res);
        bool settled = std::abs(next - lambda) <= opt.tolerance * std::abs(next) && res <= opt.residual * std::abs(next);
        lambda = next;
        if (settled) return {lambda, v, it};
    }
    throw ConvergenceError("top_singular: power iteration did not converge within " +
                           std::to_string(opt.max_iterations) + " iterations");
}

/// Outcome of alternating maximization on a selection system.
struct AlternatingResult {
    double ratio = 0.0;                ///< sqrt(objective) for the unit witness, via the nonlinear max
    std::vector<Complex> coeffs;       ///< unit-norm witness
    CutoffAssignment assignment;
    std::vector<double> trace;         ///< nonlinear ratio after each cutoff update, best restart
};

struct AlternatingOptions {
    std::size_t restarts = 8;
    std::size_t iterations = 50;
    PowerIterationOptions power{};
};

namespace detail {

inline AlternatingResult alternate_from(const SelectionSystem& sys, std::vector<Complex> a, const AlternatingOptions& opt) {
    AlternatingResult res;
    normalize_in_place(a);
    auto [assign, obj] = sys.best_cutoffs(a);
    res.trace.push_back(std::sqrt(obj));
    for (std::size_t it = 0; it < opt.iterations; ++it) {
        TopSingular top = top_singular(sys, assign, a, opt.power);
        const double current = sys.linear_objective(assign, a);
        const double candidate = sys.linear_objective(assign, top.vector);
        if (!(candidate > current)) break;
        a = std::move(top.vector);
        auto [next_assign, next_obj] = sys.best_cutoffs(a);
        if (std::sqrt(next_obj) < res.trace.back() - 1e-12 * res.trace.back())
            throw std::logic_error("alternating maximization: objective decreased");
        res.trace.push_back(std::sqrt(next_obj));
        bool same = next_assign == assign;
        assign = std::move(next_assign);
        obj = next_obj;
        if (same) break;
    }
    res.ratio = std::sqrt(obj);
    fix_global_phase(a);
    res.coeffs = std::move(a);
    res.assignment = std::move(assign);
    return res;
}

} // namespace detail

/// Alternating maximization: fix a, take each row's argmax prefix; fix the
/// assignment, move a to the top singular vector. Runs `restarts` random starts
/// plus any caller-supplied starts; keeps the first strictly best result.
inline AlternatingResult alternating_maximize(const SelectionSystem& sys, const AlternatingOptions& opt,
                                              std::mt19937_64& rng,
                                              const std::vector<std::vector<Complex>>& extra_starts = {}) {
    AlternatingResult best;
    best.ratio = -1.0;
    auto consider = [&](AlternatingResult r) {
        if (r.ratio > best.ratio) best = std::move(r);
    };
    for (const auto& s : extra_starts) consider(detail::alternate_from(sys, s, opt));
    for (std::size_t k = 0; k < opt.restarts; ++k) consider(detail::alternate_from(sys, random_unit_vector(sys.cols(), rng), opt));
    if (best.ratio < 0) throw UsageError("alternating_maximize: no starts requested");
    return best;
}

// =============================================================================
// Delta estimates
// =============================================================================

enum class EstimateKind { exact, lower_bound, upper_bound };

inline std::string to_string(EstimateKind k) {
    switch (k) {
        case EstimateKind::exact: return "exact";
        case EstimateKind::lower_bound: return "lower_bound";
        case EstimateKind::upper_bound: return "upper_bound";
    }
    return "unknown";
}

struct DeltaEstimate {
    u64 N = 0;
    double value = 0.0;
    EstimateKind kind = EstimateKind::lower_bound;
    std::optional<CoefficientVector> witness_coeffs;
    std::optional<CutoffAssignment> witness_assignment;
    std::string method;
    std::vector<double> trace; ///< heuristic only: per-iteration objective of the best restart
};

/// LHS of the maximal inequality divided by ||a||_2, over all characters mod N
/// in the natural order of the coefficient indices. A certified lower bound on Delta(N).
inline double delta_ratio(const DirichletGroup& G, const CoefficientVector& a) {
    if (a.norm() == 0.0) throw UsageError("delta_ratio: zero coefficient vector");
    std::vector<std::size_t> cols(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
        u64 pos = G.position(a[j].index);
        if (pos == 0) throw UsageError("delta_ratio: coefficient index " + std::to_string(a[j].index) +
                                       " is not a unit in [1, N-1]");
        cols[j] = pos - 1;
    }
    double total = 0.0;
    for (u64 c = 0; c < G.phi(); ++c) {
        double m = detail::prefix_sweep(a, [&](std::size_t j) { return a[j].value * G.value(c, cols[j]); }).first;
        total += m * m;
    }
    return std::sqrt(total / static_cast<double>(G.phi())) / a.norm();
}

inline double delta_ratio(u64 N, const CoefficientVector& a) { return delta_ratio(DirichletGroup(N), a); }

struct ExactOptions {
    u64 max_modulus = 10;
    u64 max_assignments = 1'000'000;
    u64 seed = 0;
    PowerIterationOptions power{};
};

/// Delta(N) by exhausting all cutoff assignments; each is a largest-singular-value
/// problem solved by power iteration. Assignments are visited in lexicographic
/// order and only a strictly larger value replaces the incumbent.
inline DeltaEstimate delta_exact_small(u64 N, const ExactOptions& opt = {}) {
    if (N < 2) throw UsageError("delta_exact_small: N must be >= 2");
    if (N > opt.max_modulus)
        throw BudgetError("delta_exact_small: N = " + std::to_string(N) + " exceeds the exact cap " +
                          std::to_string(opt.max_modulus));
    DirichletGroup G(N);
    const u64 K = G.phi();
    const double count = std::pow(static_cast<double>(K), static_cast<double>(K));
    if (count > static_cast<double>(opt.max_assignments))
        throw BudgetError("delta_exact_small: " + std::to_string(static_cast<u64>(count)) + " assignments exceed budget");
    SelectionSystem sys = SelectionSystem::from_characters(G);
    std::mt19937_64 rng(opt.seed);
    const std::vector<Complex> start = random_unit_vector(K, rng);

    CutoffAssignment assign(K, 1), best_assign;
    double best_lambda = -1.0;
    std::vector<Complex> best_vec;
    const auto total = static_cast<u64>(count);
    for (u64 code = 0; code < total; ++code) {
        u64 c = code;
        for (std::size_t r = K; r-- > 0;) {
            assign[r] = c % K + 1;
            c /= K;
        }
        TopSingular top = top_singular(sys, assign, start, opt.power);
        if (top.lambda > best_lambda) {
            best_lambda = top.lambda;
            best_vec = std::move(top.vector);
            best_assign = assign;
        }
    }
    fix_global_phase(best_vec);
    DeltaEstimate est;
    est.N = N;
    est.kind = EstimateKind::exact;
    est.value = std::sqrt(best_lambda * sys.weight());
    std::vector<CoefficientEntry> entries;
    for (std::size_t j = 0; j < K; ++j) entries.push_back({G.units()[j], best_vec[j]});
    est.witness_coeffs = CoefficientVector(std::move(entries));
    est.witness_assignment = std::move(best_assign);
    est.method = "exhaustive cutoff assignments (" + std::to_string(total) + ") with power iteration";
    return est;
}

struct HeuristicOptions {
    std::size_t restarts = 50;
    std::size_t iterations = 50;
    u64 seed = 0;
    PowerIterationOptions power{};
};

/// Lower bound on Delta(N) by alternating maximization over random starts.
inline DeltaEstimate delta_heuristic(u64 N, const HeuristicOptions& opt = {}) {
    if (N < 3) throw UsageError("delta_heuristic: N must be >= 3");
    if (opt.restarts == 0) throw UsageError("delta_heuristic: restarts must be >= 1");
    DirichletGroup G(N);
    SelectionSystem sys = SelectionSystem::from_characters(G);
    std::mt19937_64 rng(opt.seed);
    AlternatingResult best = alternating_maximize(sys, {opt.restarts, opt.iterations, opt.power}, rng);

    std::vector<CoefficientEntry> entries;
    for (std::size_t j = 0; j < G.phi(); ++j) entries.push_back({G.units()[j], best.coeffs[j]});
    DeltaEstimate est;
    est.N = N;
    est.kind = EstimateKind::lower_bound;
    est.witness_coeffs = CoefficientVector(std::move(entries));
    est.value = delta_ratio(G, *est.witness_coeffs);
    est.witness_assignment = std::move(best.assignment);
    est.trace = std::move(best.trace);
    est.method = "alternating maximization, " + std::to_string(opt.restarts) + " restarts x " +
                 std::to_string(opt.iterations) + " iterations, seed " + std::to_string(opt.seed);
    return est;
}

/// Dyadic-chaining ceiling ceil(log2 phi(N)) + 1: every prefix of length <= 2^L
/// splits into at most L+1 dyadic blocks, and Cauchy-Schwarz over the blocks
/// plus orthonormality within each level gives the factor L+1.
inline DeltaEstimate rm_upper_bound(u64 N) {
    if (N < 3) throw UsageError("rm_upper_bound: N must be >= 3");
    const u64 phi = euler_phi(N);
    const u64 levels = static_cast<u64>(std::bit_width(phi - 1)); // ceil(log2 phi)
    DeltaEstimate est;
    est.N = N;
    est.kind = EstimateKind::upper_bound;
    est.value = static_cast<double>(levels + 1);
    est.method = "Rademacher-Menshov dyadic chaining: ceil(log2 phi(N)) + 1";
    return est;
}

} // namespace charmax
