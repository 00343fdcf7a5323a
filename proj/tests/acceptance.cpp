// Acceptance suite: one PASS/FAIL line per check, each with its time limit.
// Exit status is nonzero if any check fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "charmax/charmax.hpp"
#include "oracles.hpp"

using namespace charmax;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

const std::vector<std::pair<u64, u64>> kTransportPairs{{7, 3}, {11, 5}, {23, 11}, {59, 29}, {107, 53}};

std::vector<Permutation> all_permutations(std::size_t s) {
    std::vector<Permutation> out;
    Permutation p = identity_permutation(s);
    do out.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    return out;
}

Outcome orthogonality_parseval() {
    double worst_orth = 0, worst_parseval = 0;
    std::mt19937_64 rng(1);
    for (u64 p = 3; p <= 31; ++p) {
        if (!is_prime(p)) continue;
        GroupContext ctx(p);
        for (u64 n = 1; n < p; ++n)
            for (u64 m = 1; m < p; ++m) {
                Complex s{};
                for (u64 a = 0; a + 1 < p; ++a) s += eval_character(ctx, a, n) * std::conj(eval_character(ctx, a, m));
                s /= double(p - 1);
                worst_orth = std::max(worst_orth, std::abs(s - Complex(n == m ? 1.0 : 0.0)));
            }
        // Full cutoff on every character: the linear form with l = p-1 throughout.
        DirichletGroup G(p);
        SelectionSystem sys = SelectionSystem::from_characters(G);
        CutoffAssignment full(G.phi(), G.phi());
        for (int t = 0; t < 100; ++t) {
            auto a = oracle::random_complex(p - 1, rng);
            double l2avg = std::sqrt(sys.linear_objective(full, a));
            double norm = oracle::l2(a);
            worst_parseval = std::max(worst_parseval, std::abs(l2avg - norm) / norm);
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "max orthogonality error %.3g (tol 1e-10), max Parseval rel error %.3g (tol 1e-10)",
                  worst_orth, worst_parseval);
    return {worst_orth <= 1e-10 && worst_parseval <= 1e-10, buf};
}

Outcome transport() {
    double worst = 0;
    std::mt19937_64 rng(2);
    for (auto [p, q] : kTransportPairs) {
        auto sub = build_subgroup_context(build_group_context(p), q);
        for (int t = 0; t < 100; ++t) {
            auto a = CoefficientVector::dense(oracle::random_complex(q, rng));
            auto r = transport_subgroup_to_additive(*sub, a);
            worst = std::max(worst, std::abs(r.lhs - r.rhs) / std::max(std::abs(r.lhs), std::abs(r.rhs)));
        }
    }
    char buf[120];
    std::snprintf(buf, sizeof buf, "max relative gap %.3g over 5 pairs x 100 vectors (tol 1e-9)", worst);
    return {worst <= 1e-9, buf};
}

Outcome reduction_chain() {
    bool ok = true;
    double worst = 0;
    for (u64 p : {23u, 47u, 59u}) {
        const std::size_t k = static_cast<std::size_t>(std::bit_width(p) - 1) - 1;
        std::mt19937_64 rng(p);
        for (int t = 0; t < 50; ++t) {
            auto a = CoefficientVector::dense(oracle::random_complex(k, rng));
            auto rep = verify_ch_reduction(p, a);
            worst = std::max(worst, rep.max_relative_gap);
            // 2^M > p as an exact integer comparison.
            bool exceeds = rep.M >= 64 || (u64{1} << rep.M) > p;
            ok = ok && rep.max_relative_gap <= 1e-9 && (p - 1) % rep.M == 0 && std::gcd(rep.L, rep.M) == 1 && exceeds;
        }
    }
    char buf[120];
    std::snprintf(buf, sizeof buf, "max pairwise relative gap %.3g (tol 1e-9); divisibility, coprimality, 2^M > p", worst);
    return {ok, buf};
}

Json delta_oracle_json() {
    Json out = Json::array();
    for (u64 N : {3u, 4u, 5u}) {
        out.push_back(to_json(delta_exact_small(N)));
        out.push_back(to_json(delta_heuristic(N, {50, 50, 0, {}})));
    }
    return out;
}

Outcome delta_oracle() {
    bool ok = true;
    std::string detail;
    std::mt19937_64 rng(4);
    for (u64 N : {3u, 4u, 5u}) {
        const double exact = delta_exact_small(N).value;
        const double heur = delta_heuristic(N, {50, 50, 0, {}}).value;
        const double ceiling = rm_upper_bound(N).value;
        DirichletGroup G(N);
        double worst = 0;
        for (int t = 0; t < 10'000; ++t) {
            auto v = random_unit_vector(G.phi(), rng);
            std::vector<CoefficientEntry> e;
            for (std::size_t j = 0; j < G.phi(); ++j) e.push_back({G.units()[j], v[j]});
            worst = std::max(worst, delta_ratio(G, CoefficientVector(std::move(e))));
        }
        ok = ok && heur >= exact - 1e-6 && heur <= exact + 1e-9 && worst <= exact + 1e-6 && exact >= 1.0 &&
             exact <= ceiling;
        char buf[160];
        std::snprintf(buf, sizeof buf, "%sN=%llu exact %.10f heuristic %.10f random max %.6f ceiling %.0f", detail.empty() ? "" : "; ",
                      static_cast<unsigned long long>(N), exact, heur, worst, ceiling);
        detail += buf;
    }
    return {ok, detail};
}

Outcome fh_identity() {
    double worst = 0;
    std::size_t count = 0;
    for (auto [p, q] : kTransportPairs) {
        auto sub = build_subgroup_context(build_group_context(p), q);
        for (std::size_t s = 1; s <= 3; ++s) {
            u64 total = 1;
            for (std::size_t k = 0; k < s; ++k) total *= 7;
            for (u64 code = 0; code < total; ++code) {
                std::vector<i64> h(s);
                u64 c = code;
                for (std::size_t k = 0; k < s; ++k) h[k] = i64(c % 7) - 3, c /= 7;
                auto r = fh_identity_check(*sub, h, s);
                worst = std::max(worst, std::abs(r.lhs - r.rhs));
                ++count;
            }
        }
    }
    char buf[120];
    std::snprintf(buf, sizeof buf, "%zu vectors with |h|_inf <= 3, s <= 3; max |lhs - rhs| %.3g (tol 1e-10)", count, worst);
    return {worst <= 1e-10, buf};
}

Outcome weil_bound() {
    std::mt19937_64 rng(6);
    double worst_slack = -1e300;
    std::size_t count = 0;
    for (u64 p : {7u, 11u, 13u, 17u, 19u, 23u}) {
        std::uniform_int_distribution<i64> coef(0, i64(p) - 1);
        for (u64 n = 2; n <= 5; ++n)
            for (i64 lead = 1; lead < i64(p); ++lead)
                for (int t = 0; t < 500; ++t) {
                    std::vector<i64> c(n + 1);
                    for (u64 i = 0; i < n; ++i) c[i] = coef(rng);
                    c[n] = lead;
                    worst_slack = std::max(worst_slack, std::abs(weil_sum(p, c)) - double(n - 1) * std::sqrt(double(p)));
                    ++count;
                }
    }
    const double gauss = std::abs(weil_sum(7, {0, 0, 1}));
    char buf[160];
    std::snprintf(buf, sizeof buf, "%zu polynomials, max |S| - (n-1)sqrt(p) = %.3g (tol 1e-6); |Gauss sum mod 7| - sqrt7 = %.3g",
                  count, worst_slack, gauss - std::sqrt(7.0));
    return {worst_slack <= 1e-6 && std::abs(gauss - std::sqrt(7.0)) <= 1e-9, buf};
}

Outcome etk_validity() {
    bool ok = true;
    double min_margin = 1e300;
    for (auto [p, q] : kTransportPairs) {
        auto sub = build_subgroup_context(build_group_context(p), q);
        for (std::size_t s = 1; s <= 3; ++s) {
            auto ps = subgroup_point_set(*sub, s);
            const double emp = empirical_grid_discrepancy(ps, 3 * s);
            for (u64 m = 1; m <= 8; ++m) {
                const double bound = etk_bound(ps, m);
                min_margin = std::min(min_margin, bound - emp);
                ok = ok && bound + 1e-9 >= emp;
            }
        }
    }
    double worst_line = 0;
    for (u64 m = 1; m <= 8; ++m) {
        PointSet ps;
        ps.s = 1;
        ps.denominator = m + 1;
        for (u64 k = 0; k <= m; ++k) {
            ps.numerators.push_back({k});
            ps.points.push_back({double(k) / double(m + 1)});
        }
        worst_line = std::max(worst_line, std::abs(etk_bound(ps, m) - 18.0 / double(m)));
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "min (bound - empirical) %.4g; equally spaced line max |bound - 18/m| %.3g (tol 1e-9)",
                  min_margin, worst_line);
    return {ok && worst_line <= 1e-9, buf};
}

Outcome ordered_elements() {
    bool ok = true;
    std::string detail;
    auto sub107 = build_subgroup_context(build_group_context(107), 53);
    for (const auto& sigma : all_permutations(2)) ok = ok && find_ordered_element(*sub107, 2, sigma).has_value();
    detail = std::string("(107,53) s=2: ") + (ok ? "2/2" : "missing");
    std::optional<PrimePair> big;
    for (const auto& pp : scan_fouvry_primes(5000, 1.0, 0.6687))
        if (pp.q >= 500) {
            big = pp;
            break;
        }
    if (!big) return {false, detail + "; no scanned pair with q >= 500"};
    auto sub = build_subgroup_context(build_group_context(big->p), big->q);
    int found = 0;
    for (const auto& sigma : all_permutations(3)) found += find_ordered_element(*sub, 3, sigma).has_value();
    detail += "; (" + std::to_string(big->p) + "," + std::to_string(big->q) + ") s=3: " + std::to_string(found) + "/6";
    return {ok && found == 6, detail};
}

Json end_to_end_json(const std::vector<CounterexampleReport>& reps) {
    Json out = Json::array();
    for (const auto& r : reps) out.push_back(to_json(r));
    return out;
}

std::vector<CounterexampleReport> end_to_end_reports() {
    std::vector<CounterexampleReport> reps;
    for (const auto& pair : scan_fouvry_primes(5000, 1.0, 0.6687)) reps.push_back(build_counterexample(pair));
    return reps;
}

Outcome end_to_end() {
    auto reps = end_to_end_reports();
    bool ok = !reps.empty();
    double worst_identity = 0, worst_check = 0, min_bound = 1e300, max_bound = 0;
    for (const auto& r : reps) {
        for (const auto& id : r.identities) worst_identity = std::max(worst_identity, id.abs_error);
        // Independent re-evaluation through the character table.
        const double again = delta_ratio(r.p, r.assembled);
        worst_check = std::max(worst_check, std::abs(again - r.delta_lower_bound));
        min_bound = std::min(min_bound, r.delta_lower_bound);
        max_bound = std::max(max_bound, r.delta_lower_bound);
        ok = ok && r.identities_hold() && r.delta_lower_bound >= 1.0 - 1e-12 && r.delta_lower_bound <= rm_upper_bound(r.p).value;
    }
    char buf[400];
    std::snprintf(buf, sizeof buf,
                  "%zu primes; max identity error %.3g; max |bound - delta_ratio| %.3g (tol 1e-9); bounds in [%.17g, %.6f] (floor 1 - 1e-12)",
                  reps.size(), worst_identity, worst_check, min_bound, max_bound);
    return {ok && worst_identity <= 1e-9 && worst_check <= 1e-9, buf};
}

Outcome determinism() {
    const std::string d1 = dump17(delta_oracle_json()), d2 = dump17(delta_oracle_json());
    const std::string e1 = dump17(end_to_end_json(end_to_end_reports()));
    const std::string e2 = dump17(end_to_end_json(end_to_end_reports()));
    char buf[160];
    std::snprintf(buf, sizeof buf, "delta reports %zu bytes %s; end-to-end reports %zu bytes %s", d1.size(),
                  d1 == d2 ? "identical" : "DIFFER", e1.size(), e1 == e2 ? "identical" : "DIFFER");
    return {d1 == d2 && e1 == e2, buf};
}

} // namespace

int main() {
    struct Check {
        int id;
        const char* name;
        double limit_s;
        std::function<Outcome()> fn;
    };
    const std::vector<Check> checks{
        {1, "orthogonality_parseval", 10, orthogonality_parseval},
        {2, "transport_identity", 30, transport},
        {3, "reduction_chain", 60, reduction_chain},
        {4, "exact_delta_oracle", 120, delta_oracle},
        {5, "fh_identity", 60, fh_identity},
        {6, "weil_bound", 60, weil_bound},
        {7, "etk_validity", 120, etk_validity},
        {8, "ordered_element_search", 60, ordered_elements},
        {9, "end_to_end_counterexample", 300, end_to_end},
        {10, "determinism", 600, determinism},
    };
    int failures = 0;
    for (const auto& c : checks) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool pass = o.ok && secs < c.limit_s;
        failures += !pass;
        std::printf("%s %2d %-26s %7.2fs (limit %.0fs)  %s\n", pass ? "PASS" : "FAIL", c.id, c.name, secs, c.limit_s,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
