#pragma once

// Command-line front end for the charmax library. Kept in a header so the test
// suite can drive it in-process with captured streams.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "charmax/charmax.hpp"

namespace charmax::cli {

enum ExitCode : int {
    kOk = 0,
    kInternal = 1,
    kUsage = 2,
    kBudget = 3,
    kCheckFailed = 4,
    kNotFound = 5,
};

/// Free constants and run parameters. Defaults, then a key=value config file,
/// then command-line flags.
struct RunConfig {
    u64 seed = 1;
    double B = 1.0;
    double fouvry_exponent = 0.6687;
    double delta_param = 1.0;
    double delta1 = 1.0;
    double c1 = 0.1;
    double c2 = 0.01;
    u64 s_cap = 8;
    u64 restarts = 50;
    u64 iters = 50;
    u64 tau_grid = 64;
    u64 search_budget = 2000;
    u64 exact_cap = 10;
    std::string format; ///< json, csv or text; empty means the subcommand's default

    void set(const std::string& key, const std::string& value) {
        auto as_double = [&] {
            std::size_t used = 0;
            double v = std::stod(value, &used);
            if (used != value.size()) throw UsageError("config: bad number for " + key + ": " + value);
            return v;
        };
        auto as_u64 = [&] {
            std::size_t used = 0;
            if (!value.empty() && value[0] == '-') throw UsageError("config: " + key + " must be positive");
            u64 v = std::stoull(value, &used);
            if (used != value.size()) throw UsageError("config: bad integer for " + key + ": " + value);
            return v;
        };
        try {
            if (key == "seed") seed = as_u64();
            else if (key == "B") B = as_double();
            else if (key == "fouvry_exponent") fouvry_exponent = as_double();
            else if (key == "delta_param") delta_param = as_double();
            else if (key == "delta1") delta1 = as_double();
            else if (key == "c1") c1 = as_double();
            else if (key == "c2") c2 = as_double();
            else if (key == "s_cap") s_cap = as_u64();
            else if (key == "restarts") restarts = as_u64();
            else if (key == "iters") iters = as_u64();
            else if (key == "tau_grid") tau_grid = as_u64();
            else if (key == "search_budget") search_budget = as_u64();
            else if (key == "exact_cap") exact_cap = as_u64();
            else if (key == "format") format = value;
            else throw UsageError("config: unknown key '" + key + "'");
        } catch (const std::logic_error& e) {
            if (dynamic_cast<const UsageError*>(&e)) throw;
            throw UsageError("config: bad value for " + key + ": " + value);
        }
    }

    void validate() const {
        auto positive = [](double v, const char* name) {
            if (!(v > 0)) throw UsageError(std::string("config: ") + name + " must be positive");
        };
        positive(static_cast<double>(seed), "seed");
        positive(B, "B");
        positive(fouvry_exponent, "fouvry_exponent");
        if (fouvry_exponent >= 1) throw UsageError("config: fouvry_exponent must be < 1");
        positive(delta_param, "delta_param");
        positive(delta1, "delta1");
        positive(c1, "c1");
        positive(c2, "c2");
        positive(static_cast<double>(s_cap), "s_cap");
        positive(static_cast<double>(restarts), "restarts");
        positive(static_cast<double>(iters), "iters");
        positive(static_cast<double>(tau_grid), "tau_grid");
        positive(static_cast<double>(search_budget), "search_budget");
        positive(static_cast<double>(exact_cap), "exact_cap");
        if (!format.empty() && format != "json" && format != "csv" && format != "text")
            throw UsageError("config: format must be one of json, csv, text");
    }

    void load_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw UsageError("config: cannot open " + path);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            auto trim = [](std::string s) {
                auto b = s.find_first_not_of(" \t\r");
                auto e = s.find_last_not_of(" \t\r");
                return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
            };
            line = trim(line);
            if (line.empty()) continue;
            auto eq = line.find('=');
            if (eq == std::string::npos)
                throw UsageError("config: " + path + ":" + std::to_string(lineno) + ": expected key=value");
            set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        }
    }

    CounterexampleConfig counterexample() const {
        CounterexampleConfig c;
        c.seed = seed;
        c.delta_param = delta_param;
        c.s_cap = s_cap;
        c.search_budget = search_budget;
        c.rearrangement.c1 = c1;
        c.rearrangement.c2 = c2;
        return c;
    }
};

namespace detail {

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void print_text(std::ostream& out, const Json& j, const std::string& prefix = {}) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
        if (it->is_object()) print_text(out, *it, key);
        else if (it->is_number_float()) out << key << ": " << fmt17(it->get<double>()) << '\n';
        else out << key << ": " << it->dump() << '\n';
    }
}

inline void emit(std::ostream& out, const Json& j, const std::string& format) {
    if (format == "text") print_text(out, j);
    else out << dump17(j) << '\n';
}

inline std::vector<Complex> random_coefficients(std::size_t k, u64 seed) {
    std::mt19937_64 rng(seed);
    return random_unit_vector(k, rng);
}

} // namespace detail

/// Runs one command line. Returns the process exit code; never throws.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"charmax: maximal operators for multiplicative characters"};
    app.require_subcommand(1);
    app.fallthrough();

    u64 seed = 1;
    std::string config_path, format;
    auto* seed_opt = app.add_option("--seed", seed, "random seed");
    auto* config_opt = app.add_option("--config", config_path, "key=value config file (default: $CHARMAX_CONFIG)");
    auto* format_opt = app.add_option("--format", format, "json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}));

    // scan
    auto* scan = app.add_subcommand("scan", "primes p <= limit with a prime factor q | p-1, q >= B p^exponent");
    i64 scan_limit = 0;
    scan->add_option("--limit", scan_limit, "upper bound on p")->required();

    // delta
    auto* delta = app.add_subcommand("delta", "estimate Delta(N)");
    u64 delta_n = 0;
    std::string delta_mode = "heuristic";
    delta->add_option("--n", delta_n, "modulus (table mode: largest modulus)")->required();
    delta->add_option("--mode", delta_mode, "exact, heuristic, rm or table")
        ->check(CLI::IsMember({"exact", "heuristic", "rm", "table"}));

    // counterexample
    auto* cex = app.add_subcommand("counterexample", "build and verify the subgroup counterexample");
    u64 cex_p = 0, cex_q = 0, cex_s = 0, cex_scan_limit = 0;
    std::string witness_path;
    cex->add_option("--p", cex_p, "prime modulus");
    cex->add_option("--q", cex_q, "prime divisor of p-1 (default: largest)");
    cex->add_option("--s", cex_s, "dimension override");
    cex->add_option("--witness", witness_path, "reuse (sigma, b) exported by `rearrange --export`");
    cex->add_option("--scan-limit", cex_scan_limit, "run over every scanned prime <= limit and emit CSV");

    // reduction
    auto* red = app.add_subcommand("reduction", "verify the Z_p^* -> Z_M reduction chain through chi(2^i)");
    u64 red_p = 0, red_k = 0;
    red->add_option("--p", red_p, "prime modulus")->required();
    red->add_option("--k", red_k, "number of coefficients (default floor(log2 p) - 1)");

    // discrepancy
    auto* disc = app.add_subcommand("discrepancy", "equidistribution diagnostics for subgroup power orbits");
    u64 disc_p = 0, disc_q = 0, disc_s = 1, disc_m = 0, disc_res = 0;
    std::string points_csv;
    disc->add_option("--p", disc_p, "prime modulus")->required();
    disc->add_option("--q", disc_q, "subgroup order")->required();
    disc->add_option("--s", disc_s, "dimension")->required();
    disc->add_option("--m", disc_m, "ETK frequency cutoff (default ceil(s^(delta1 s)))");
    disc->add_option("--resolution", disc_res, "grid resolution for the empirical lower bound (default 3s)");
    disc->add_option("--points-csv", points_csv, "also write the point set as CSV");

    // rearrange
    auto* rea = app.add_subcommand("rearrange", "search for a bad ordering of [N]");
    u64 rea_n = 0, rea_m = 0, rea_budget = 0;
    std::string export_path;
    rea->add_option("--n", rea_n, "length N")->required();
    rea->add_option("--m", rea_m, "evaluation modulus M (default 4N)");
    auto* budget_opt = rea->add_option("--budget", rea_budget, "candidate permutations (default: search_budget)");
    rea->add_option("--export", export_path, "write (sigma, b) as JSON for counterexample --witness");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error[usage]: " << e.what() << '\n';
        return kUsage;
    }

    try {
        RunConfig cfg;
        if (config_opt->count()) {
            cfg.load_file(config_path);
        } else if (const char* env = std::getenv("CHARMAX_CONFIG"); env && *env) {
            cfg.load_file(env);
        }
        if (seed_opt->count()) cfg.seed = seed;
        if (format_opt->count()) cfg.format = format;
        cfg.validate();

        if (scan->parsed()) {
            if (scan_limit < 1) throw UsageError("scan: --limit must be a positive integer");
            auto pairs = scan_fouvry_primes(static_cast<u64>(scan_limit), cfg.B, cfg.fouvry_exponent);
            const std::string fmt = cfg.format.empty() ? "csv" : cfg.format;
            if (fmt == "csv") {
                out << "p,q,exponent_achieved\n";
                for (const auto& pp : pairs) out << pp.p << ',' << pp.q << ',' << detail::fmt17(pp.ratio_exponent) << '\n';
            } else {
                Json arr = Json::array();
                for (const auto& pp : pairs) arr.push_back(to_json(pp));
                if (fmt == "json") out << dump17(arr) << '\n';
                else
                    for (const auto& j : arr) detail::print_text(out, j), out << '\n';
            }
            return kOk;
        }

        if (delta->parsed()) {
            const std::string fmt = cfg.format.empty() ? (delta_mode == "table" ? "csv" : "json") : cfg.format;
            ExactOptions ex;
            ex.max_modulus = cfg.exact_cap;
            ex.seed = cfg.seed;
            HeuristicOptions he;
            he.restarts = cfg.restarts;
            he.iterations = cfg.iters;
            he.seed = cfg.seed;
            if (delta_mode == "table") {
                if (delta_n < 3) throw UsageError("delta: table mode needs --n >= 3");
                Json rows = Json::array();
                for (u64 N = 3; N <= delta_n; ++N) {
                    Json row{{"N", N}, {"lower_bound", delta_heuristic(N, he).value}};
                    try {
                        row["exact"] = delta_exact_small(N, ex).value;
                    } catch (const BudgetError&) {
                        row["exact"] = nullptr;
                    }
                    row["rm_ceiling"] = rm_upper_bound(N).value;
                    rows.push_back(row);
                }
                if (fmt == "json") {
                    out << dump17(rows) << '\n';
                } else {
                    const char sep = fmt == "csv" ? ',' : '\t';
                    out << "N" << sep << "lower_bound" << sep << "exact" << sep << "rm_ceiling\n";
                    for (const auto& r : rows) {
                        out << r["N"].get<u64>() << sep << detail::fmt17(r["lower_bound"].get<double>()) << sep
                            << (r["exact"].is_null() ? std::string{} : detail::fmt17(r["exact"].get<double>())) << sep
                            << detail::fmt17(r["rm_ceiling"].get<double>()) << '\n';
                    }
                }
                return kOk;
            }
            DeltaEstimate est;
            if (delta_mode == "exact") est = delta_exact_small(delta_n, ex);
            else if (delta_mode == "heuristic") est = delta_heuristic(delta_n, he);
            else est = rm_upper_bound(delta_n);
            detail::emit(out, to_json(est), fmt);
            return kOk;
        }

        if (cex->parsed()) {
            CounterexampleConfig cc = cfg.counterexample();
            if (cex_scan_limit > 0) {
                auto rows = growth_series(cex_scan_limit, cfg.B, cfg.fouvry_exponent, cc);
                out << "p,q,s,delta_lower_bound,ref_scale,runtime_ms\n";
                for (const auto& r : rows)
                    out << r.p << ',' << r.q << ',' << r.s << ',' << detail::fmt17(r.delta_lower_bound) << ','
                        << detail::fmt17(r.reference_scale) << ',' << std::fixed << std::setprecision(3) << r.runtime_ms
                        << std::defaultfloat << '\n';
                return kOk;
            }
            if (cex_p == 0) throw UsageError("counterexample: --p or --scan-limit is required");
            if (!is_prime(cex_p) || cex_p < 3) throw UsageError("counterexample: p must be an odd prime");
            const u64 q = cex_q ? cex_q : largest_prime_factor(cex_p - 1);
            if (cex_s) cc.s_override = cex_s;
            CounterexampleReport rep;
            if (!witness_path.empty()) {
                std::ifstream in(witness_path);
                if (!in) throw UsageError("counterexample: cannot open " + witness_path);
                Json w = Json::parse(in);
                Permutation sigma = w.at("sigma").get<Permutation>();
                CoefficientVector b = coefficients_from_json(w.at("b"));
                auto sub = build_subgroup_context(build_group_context(cex_p), q);
                auto g = find_ordered_element(*sub, sigma.size(), sigma);
                if (!g) throw NotFoundError("counterexample: no element of A orders its powers by the witness sigma");
                rep = assemble_counterexample(*sub, sigma, b, *g);
                rep.s_attempted = {sigma.size()};
            } else {
                rep = build_counterexample({cex_p, q, 0.0}, cc);
            }
            detail::emit(out, to_json(rep), cfg.format.empty() ? "json" : cfg.format);
            if (!rep.identities_hold() || std::abs(rep.delta_lower_bound - rep.delta_ratio_check) > 1e-9 ||
                rep.delta_lower_bound > rep.rm_ceiling) {
                err << "error[check]: counterexample identity chain failed for p=" << cex_p << '\n';
                return kCheckFailed;
            }
            return kOk;
        }

        if (red->parsed()) {
            if (!is_prime(red_p) || red_p < 3) throw UsageError("reduction: p must be an odd prime");
            u64 k = red_k;
            if (k == 0) {
                const auto lg = static_cast<u64>(std::bit_width(red_p) - 1);
                if (lg < 2) throw UsageError("reduction: p too small for the default k");
                k = lg - 1;
            }
            auto a = CoefficientVector::dense(detail::random_coefficients(k, cfg.seed));
            ReductionReport rep = verify_ch_reduction(red_p, a);
            Json j = to_json(rep);
            j["coefficients"] = to_json(a);
            detail::emit(out, j, cfg.format.empty() ? "json" : cfg.format);
            if (!rep.holds()) {
                err << "error[check]: reduction chain failed for p=" << red_p << '\n';
                return kCheckFailed;
            }
            return kOk;
        }

        if (disc->parsed()) {
            auto sub = build_subgroup_context(build_group_context(disc_p), disc_q);
            const u64 m = disc_m ? disc_m : etk_m_schedule(disc_s, cfg.delta1);
            const u64 res = disc_res ? disc_res : 3 * disc_s;
            DiscrepancyReport rep = discrepancy_report(*sub, disc_s, m, res);
            if (!points_csv.empty()) {
                std::ofstream pc(points_csv);
                if (!pc) throw UsageError("discrepancy: cannot write " + points_csv);
                write_point_set_csv(pc, subgroup_point_set(*sub, disc_s));
            }
            detail::emit(out, to_json(rep), cfg.format.empty() ? "json" : cfg.format);
            if (rep.etk_bound + 1e-9 < rep.empirical_lower) {
                err << "error[check]: ETK bound below empirical discrepancy\n";
                return kCheckFailed;
            }
            return kOk;
        }

        if (rea->parsed()) {
            const u64 M = rea_m ? rea_m : 4 * rea_n;
            const u64 budget = budget_opt->count() ? rea_budget : cfg.search_budget;
            RearrangementOptions ro;
            ro.c1 = cfg.c1;
            ro.c2 = cfg.c2;
            BadOrderWitness w = search_bad_permutation(rea_n, M, budget, cfg.seed, ro);
            ShiftDiscretization sd = discretize_via_shift(w.b, w.sigma, M, cfg.tau_grid, w.threshold);
            Json j = to_json(w);
            j["shift"] = Json{{"tau_grid", cfg.tau_grid},
                              {"tau0", sd.tau0},
                              {"count", sd.count},
                              {"meets_c2", static_cast<double>(sd.count) >= cfg.c2 * static_cast<double>(M)}};
            if (!export_path.empty()) {
                std::ofstream ex(export_path);
                if (!ex) throw UsageError("rearrange: cannot write " + export_path);
                ex << dump17(Json{{"sigma", w.sigma}, {"b", to_json(w.b)}}) << '\n';
            }
            detail::emit(out, j, cfg.format.empty() ? "json" : cfg.format);
            return kOk;
        }
        throw UsageError("no subcommand");
    } catch (const UsageError& e) {
        err << "error[usage]: " << e.what() << '\n';
        return kUsage;
    } catch (const BudgetError& e) {
        err << "error[budget]: " << e.what() << '\n';
        return kBudget;
    } catch (const NotFoundError& e) {
        err << "error[notfound]: " << e.what() << '\n';
        return kNotFound;
    } catch (const ConvergenceError& e) {
        err << "error[convergence]: " << e.what() << '\n';
        return kInternal;
    } catch (const std::exception& e) {
        err << "error[internal]: " << e.what() << '\n';
        return kInternal;
    }
}

} // namespace charmax::cli
