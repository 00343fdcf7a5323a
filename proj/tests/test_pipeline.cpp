#include <gtest/gtest.h>

#include "charmax/pipeline.hpp"
#include "oracles.hpp"

using namespace charmax;

namespace {

/// sqrt((1/(p-1)) sum_chi max_l |sum_{n<=l} a_n chi(n)|^2) / ||a|| from naive logs.
double naive_ratio(u64 p, const CoefficientVector& a) {
    auto logs = oracle::naive_logs(p, primitive_root(p));
    double total = 0;
    for (u64 c = 0; c + 1 < p; ++c) {
        std::vector<oracle::C> row;
        for (const auto& e : a.entries()) row.push_back(e.value * oracle::e(double(c * logs[e.index] % (p - 1)), double(p - 1)));
        double m = oracle::naive_max_prefix(row);
        total += m * m;
    }
    return std::sqrt(total / double(p - 1)) / a.norm();
}

CoefficientVector random_unit(std::size_t n, u64 seed) {
    std::mt19937_64 rng(seed);
    return CoefficientVector::dense(oracle::random_complex(n, rng)).normalized();
}

} // namespace

TEST(Assemble, TwentyThreeIdentityOrder) {
    auto sub = build_subgroup_context(build_group_context(23), 11);
    Permutation sigma{1, 2};
    auto g = find_ordered_element(*sub, 2, sigma);
    ASSERT_TRUE(g);
    for (u64 seed = 0; seed < 10; ++seed) {
        auto b = random_unit(2, seed);
        auto rep = assemble_counterexample(*sub, sigma, b, *g);
        EXPECT_TRUE(rep.identities_hold());
        for (const auto& id : rep.identities) EXPECT_LE(id.abs_error, 1e-9 * (1 + std::abs(id.lhs))) << id.name;
        EXPECT_GE(rep.delta_lower_bound, 1.0 - 1e-12);
        EXPECT_LE(rep.delta_lower_bound, rm_upper_bound(23).value);
        EXPECT_NEAR(rep.delta_lower_bound, rep.delta_ratio_check, 1e-9);
        EXPECT_NEAR(rep.delta_lower_bound, naive_ratio(23, rep.assembled), 1e-9);
        EXPECT_NEAR(rep.assembled.norm(), 1.0, 1e-12);
        EXPECT_TRUE(std::is_sorted(rep.support.begin(), rep.support.end()));
    }
}

TEST(Assemble, SingleTermIsExactlyOne) {
    auto sub = build_subgroup_context(build_group_context(23), 11);
    auto rep = assemble_counterexample(*sub, {1}, CoefficientVector({{1, 1.0}}), sub->elements()[3]);
    EXPECT_EQ(rep.delta_lower_bound, 1.0);
    EXPECT_TRUE(rep.identities_hold());
}

TEST(Assemble, RejectsBadInput) {
    auto sub = build_subgroup_context(build_group_context(23), 11);
    auto b = random_unit(2, 1);
    EXPECT_THROW(assemble_counterexample(*sub, {1, 2}, b, 1), UsageError);
    EXPECT_THROW(assemble_counterexample(*sub, {1, 2}, b, 5), UsageError); // 5 is not in A
    EXPECT_THROW(assemble_counterexample(*sub, {1, 2, 3}, b, 2), UsageError);
    // An element whose powers are out of order for this sigma.
    for (u64 g : sub->elements()) {
        if (g == 1) continue;
        if (pow_mod(g, 2, 23) < g) {
            EXPECT_THROW(assemble_counterexample(*sub, {1, 2}, b, g), UsageError);
            break;
        }
    }
}

TEST(Assemble, NuLinearityAcrossElements) {
    auto sub = build_subgroup_context(build_group_context(107), 53);
    for (u64 g : sub->elements()) {
        if (g == 1) continue;
        auto sigma = pow_mod(g, 2, 107) > g ? Permutation{1, 2} : Permutation{2, 1};
        auto rep = assemble_counterexample(*sub, sigma, random_unit(2, g), g);
        EXPECT_TRUE(rep.nu_linearity);
        EXPECT_TRUE(rep.identities_hold());
    }
}

TEST(Build, ScannedPrimes) {
    CounterexampleConfig cfg;
    cfg.search_budget = 200;
    for (const auto& pair : scan_fouvry_primes(400, 1.0, 0.6687)) {
        auto rep = build_counterexample(pair, cfg);
        EXPECT_TRUE(rep.identities_hold()) << pair.p;
        EXPECT_GE(rep.delta_lower_bound, 1.0 - 1e-12);
        EXPECT_LE(rep.delta_lower_bound, rep.rm_ceiling);
        EXPECT_NEAR(rep.delta_lower_bound, rep.delta_ratio_check, 1e-9);
        EXPECT_EQ(rep.s, std::min<std::size_t>(dimension_scale(pair.p, 1.0), 8));
        EXPECT_NEAR(rep.reference_scale, std::pow(std::log(std::log(double(pair.p))), 0.25), 1e-15);
    }
}

TEST(Build, OverrideAndRejection) {
    CounterexampleConfig cfg;
    cfg.s_override = 3;
    cfg.search_budget = 50;
    auto rep = build_counterexample({1019, 509, 0}, cfg);
    EXPECT_EQ(rep.s, 3u);
    EXPECT_EQ(rep.s_attempted, (std::vector<std::size_t>{3}));
    EXPECT_NEAR(rep.delta_lower_bound, naive_ratio(1019, rep.assembled), 1e-9);
    EXPECT_THROW(build_counterexample({24, 11, 0}), UsageError);
    EXPECT_THROW(build_counterexample({23, 7, 0}), UsageError);
}

TEST(Build, Deterministic) {
    CounterexampleConfig cfg;
    cfg.s_override = 2;
    cfg.seed = 9;
    auto a = build_counterexample({107, 53, 0}, cfg);
    auto b = build_counterexample({107, 53, 0}, cfg);
    EXPECT_EQ(a.sigma, b.sigma);
    EXPECT_EQ(a.g, b.g);
    EXPECT_EQ(a.delta_lower_bound, b.delta_lower_bound);
    EXPECT_EQ(a.b.values(), b.b.values());
}

TEST(Reduction, TrivialVector) {
    auto rep = verify_ch_reduction(23, CoefficientVector({{1, 1.0}}));
    for (double v : rep.chain_values) EXPECT_EQ(v, 1.0);
    EXPECT_TRUE(rep.holds());
}

TEST(Reduction, TwentyThree) {
    auto rep = verify_ch_reduction(23, random_unit(4, 7));
    EXPECT_TRUE(rep.holds());
    EXPECT_EQ(rep.M, 11u);
    EXPECT_EQ(oracle::naive_pow(2, 11, 23), 1u);
    EXPECT_EQ(rep.L * 22, rep.nu2 * rep.M);
}

TEST(Reduction, RandomVectors) {
    for (u64 p : {23u, 47u, 59u, 101u, 1019u}) {
        const std::size_t k = static_cast<std::size_t>(std::floor(std::log2(double(p)))) - 1;
        // Order of 2 by repeated doubling.
        u64 x = 2, ord = 1;
        while (x != 1) x = x * 2 % p, ++ord;
        for (u64 seed = 0; seed < 50; ++seed) {
            auto a = random_unit(k, seed);
            auto rep = verify_ch_reduction(p, a);
            ASSERT_TRUE(rep.holds()) << p;
            ASSERT_EQ(rep.M, ord);
            ASSERT_EQ((p - 1) % rep.M, 0u);
            if (seed == 0) {
                // First chain value from the definition, summed in the order i = 1..k.
                auto logs = oracle::naive_logs(p, primitive_root(p));
                double total = 0;
                for (u64 c = 0; c + 1 < p; ++c) {
                    std::vector<oracle::C> row;
                    u64 pw = 1;
                    for (std::size_t i = 0; i < k; ++i) {
                        pw = pw * 2 % p;
                        row.push_back(a[i].value * oracle::e(double(c * logs[pw] % (p - 1)), double(p - 1)));
                    }
                    double m = oracle::naive_max_prefix(row);
                    total += m * m;
                }
                EXPECT_NEAR(rep.chain_values[0], std::sqrt(total / double(p - 1)), 1e-10);
            }
        }
    }
}

TEST(Reduction, Preconditions) {
    EXPECT_THROW(verify_ch_reduction(23, random_unit(5, 0)), UsageError); // 2^5 > 23
    EXPECT_THROW(verify_ch_reduction(23, CoefficientVector({{2, 1.0}})), UsageError);
    EXPECT_THROW(verify_ch_reduction(23, CoefficientVector({{1, 0.0}})), UsageError);
}

TEST(Growth, MonotoneRows) {
    CounterexampleConfig cfg;
    cfg.search_budget = 100;
    auto rows = growth_series(600, 1.0, 0.6687, cfg);
    EXPECT_EQ(rows.size(), scan_fouvry_primes(600, 1.0, 0.6687).size());
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LT(rows[i - 1].p, rows[i].p);
    for (const auto& r : rows) EXPECT_GE(r.delta_lower_bound, 1.0 - 1e-12);
}
