#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <numeric>

#include "charmax/delta.hpp"
#include "oracles.hpp"

using namespace charmax;

namespace {

/// Characters of Z_N^* by brute force over all maps on the units: a map f
/// with f(1)=1 and f(xy)=f(x)f(y), values as exponents of e(./phi).
std::vector<std::vector<u64>> naive_characters(u64 N, const std::vector<u64>& units) {
    const u64 K = units.size();
    std::vector<std::vector<u64>> out;
    std::vector<u64> f(K, 0);
    std::vector<std::size_t> pos(N, 0);
    for (std::size_t j = 0; j < K; ++j) pos[units[j]] = j;
    u64 total = 1;
    for (u64 j = 0; j < K; ++j) total *= K;
    for (u64 code = 0; code < total; ++code) {
        u64 c = code;
        for (u64 j = 0; j < K; ++j) f[j] = c % K, c /= K;
        bool ok = true;
        for (u64 i = 0; i < K && ok; ++i)
            for (u64 j = 0; j < K && ok; ++j)
                ok = f[pos[units[i] * units[j] % N]] == (f[i] + f[j]) % K;
        if (ok) out.push_back(f);
    }
    return out;
}

/// Delta(N) over all cutoff assignments, top singular values by Eigen's SVD.
double svd_delta(u64 N) {
    std::vector<u64> units;
    for (u64 n = 1; n < N; ++n)
        if (std::gcd(n, N) == 1) units.push_back(n);
    const u64 K = units.size();
    auto chars = naive_characters(N, units);
    EXPECT_EQ(chars.size(), K);
    u64 total = 1;
    for (u64 j = 0; j < K; ++j) total *= K;
    double best = 0;
    for (u64 code = 0; code < total; ++code) {
        Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(K, K);
        u64 c = code;
        for (u64 r = 0; r < K; ++r) {
            u64 len = c % K + 1;
            c /= K;
            for (u64 j = 0; j < len; ++j) S(r, j) = oracle::e(double(chars[r][j]), double(K));
        }
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(S);
        best = std::max(best, svd.singularValues()(0));
    }
    return best / std::sqrt(double(K));
}

} // namespace

TEST(DirichletGroup, CharactersAreHomomorphisms) {
    for (u64 N : {3u, 4u, 5u, 7u, 8u, 9u, 10u, 12u, 15u}) {
        DirichletGroup G(N);
        EXPECT_EQ(G.phi(), euler_phi(N));
        const auto& u = G.units();
        for (u64 c = 0; c < G.phi(); ++c)
            for (std::size_t i = 0; i < u.size(); ++i)
                for (std::size_t j = 0; j < u.size(); ++j) {
                    auto k = G.position(u[i] * u[j] % N) - 1;
                    ASSERT_NEAR(std::abs(G.value(c, i) * G.value(c, j) - G.value(c, k)), 0.0, 1e-12);
                }
        // Distinct characters, orthogonal rows.
        for (u64 c = 0; c < G.phi(); ++c)
            for (u64 d = 0; d < G.phi(); ++d) {
                Complex s{};
                for (std::size_t j = 0; j < u.size(); ++j) s += G.value(c, j) * std::conj(G.value(d, j));
                ASSERT_NEAR(std::abs(s), c == d ? double(G.phi()) : 0.0, 1e-10);
            }
    }
}

TEST(DeltaRatio, Examples) {
    EXPECT_EQ(delta_ratio(7, CoefficientVector({{1, 1.0}})), 1.0);
    EXPECT_THROW(delta_ratio(7, CoefficientVector({{1, 0.0}})), UsageError);
    EXPECT_THROW(delta_ratio(8, CoefficientVector({{2, 1.0}})), UsageError);
    std::mt19937_64 rng(4);
    for (u64 N : {5u, 9u, 11u, 13u}) {
        DirichletGroup G(N);
        for (int t = 0; t < 20; ++t) {
            std::vector<CoefficientEntry> e;
            for (u64 n : G.units()) e.push_back({n, oracle::random_complex(1, rng)[0]});
            CoefficientVector a(std::move(e));
            EXPECT_GE(delta_ratio(G, a), 1.0 - 1e-10);
        }
    }
}

TEST(DeltaRatio, ScalingInvariance) {
    std::mt19937_64 rng(9);
    for (u64 N : {7u, 10u, 13u}) {
        DirichletGroup G(N);
        std::vector<CoefficientEntry> e;
        for (u64 n : G.units()) e.push_back({n, oracle::random_complex(1, rng)[0]});
        CoefficientVector a(std::move(e));
        double base = delta_ratio(G, a);
        for (Complex c : {Complex(2.5, 0), Complex(0, -1), Complex(-3e-4, 7e3)})
            EXPECT_NEAR(delta_ratio(G, a.scaled(c)), base, 1e-10 * base);
    }
}

TEST(DeltaExact, ClosedFormAtThree) {
    // Two characters of Z_3^*; the maximizing assignment gives the matrix
    // [[1,1],[1,0]] whose squared top singular value is (3+sqrt5)/2.
    auto est = delta_exact_small(3);
    EXPECT_EQ(est.kind, EstimateKind::exact);
    EXPECT_NEAR(est.value, std::sqrt((3.0 + std::sqrt(5.0)) / 4.0), 1e-9);
}

TEST(DeltaExact, MatchesSvdOracle) {
    for (u64 N : {3u, 4u, 5u, 6u, 7u, 8u}) {
        auto est = delta_exact_small(N);
        EXPECT_NEAR(est.value, svd_delta(N), 1e-8) << N;
        EXPECT_GE(est.value, 1.0);
        EXPECT_LE(est.value, rm_upper_bound(std::max<u64>(N, 3)).value);
        // The witness re-evaluated through the nonlinear max dominates the fixed assignment.
        double r = delta_ratio(N, *est.witness_coeffs);
        EXPECT_GE(r, est.value - 1e-9);
        EXPECT_NEAR(r, est.value, 1e-8);
        ASSERT_TRUE(est.witness_assignment);
        EXPECT_EQ(est.witness_assignment->size(), euler_phi(N));
        for (u64 l : *est.witness_assignment) {
            EXPECT_GE(l, 1u);
            EXPECT_LE(l, euler_phi(N));
        }
    }
}

TEST(DeltaExact, BudgetRefusal) {
    EXPECT_THROW(delta_exact_small(11), BudgetError);
    EXPECT_THROW(delta_exact_small(1000), BudgetError);
    ExactOptions small;
    small.max_assignments = 100;
    EXPECT_THROW(delta_exact_small(7, small), BudgetError);
}

TEST(DeltaExact, RandomDirectionsNeverExceed) {
    std::mt19937_64 rng(123);
    for (u64 N : {3u, 4u, 5u}) {
        DirichletGroup G(N);
        double exact = delta_exact_small(N).value;
        double worst = 0;
        for (int t = 0; t < 10'000; ++t) {
            std::vector<CoefficientEntry> e;
            for (u64 n : G.units()) e.push_back({n, oracle::random_complex(1, rng)[0]});
            worst = std::max(worst, delta_ratio(G, CoefficientVector(std::move(e))));
        }
        EXPECT_LE(worst, exact + 1e-6) << N;
    }
}

TEST(DeltaHeuristic, AgreesWithExact) {
    for (u64 N : {3u, 4u, 5u, 7u}) {
        double exact = delta_exact_small(N).value;
        auto h = delta_heuristic(N);
        EXPECT_EQ(h.kind, EstimateKind::lower_bound);
        EXPECT_LE(h.value, exact + 1e-9) << N;
        EXPECT_GE(h.value, exact - 1e-6) << N;
    }
}

TEST(DeltaHeuristic, TraceIsNondecreasing) {
    for (u64 N : {7u, 11u, 13u, 17u}) {
        auto h = delta_heuristic(N, {10, 50, 3, {}});
        ASSERT_FALSE(h.trace.empty());
        for (std::size_t i = 1; i < h.trace.size(); ++i) EXPECT_GE(h.trace[i], h.trace[i - 1] - 1e-12);
        EXPECT_NEAR(h.value, delta_ratio(N, *h.witness_coeffs), 1e-12);
    }
}

TEST(DeltaHeuristic, Deterministic) {
    auto a = delta_heuristic(13, {5, 30, 42, {}});
    auto b = delta_heuristic(13, {5, 30, 42, {}});
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.trace, b.trace);
    EXPECT_THROW(delta_heuristic(2), UsageError);
}

TEST(RmUpperBound, Formula) {
    EXPECT_EQ(rm_upper_bound(3).value, 2.0);
    EXPECT_EQ(rm_upper_bound(5).value, 3.0);
    EXPECT_EQ(rm_upper_bound(17).value, 5.0);
    EXPECT_EQ(rm_upper_bound(18).value, 4.0); // phi = 6
    for (u64 N = 3; N < 200; ++N) EXPECT_GE(rm_upper_bound(N).value, 1.0);
    EXPECT_THROW(rm_upper_bound(2), UsageError);
}

TEST(TopSingular, PrincipalRowOnly) {
    // One all-ones row with cutoff l: top singular value sqrt(l).
    SelectionSystem sys(1, 6, 1.0);
    for (std::size_t j = 0; j < 6; ++j) sys.at(0, j) = 1.0;
    std::mt19937_64 rng(0);
    for (u64 l = 1; l <= 6; ++l) {
        auto top = top_singular(sys, {l}, random_unit_vector(6, rng));
        EXPECT_NEAR(top.lambda, double(l), 1e-9);
    }
    PowerIterationOptions tight{1e-30, 0.0, 3};
    SelectionSystem two = SelectionSystem::from_characters(DirichletGroup(7));
    EXPECT_THROW(top_singular(two, CutoffAssignment(6, 6), random_unit_vector(6, rng), tight), ConvergenceError);
}
