#pragma once

/**
 * @file json.hpp
 * @brief JSON views of every report type.
 *
 * Documents are built as nlohmann::ordered_json (insertion order is kept so
 * the output is stable) and written by dump17(), which prints every double
 * with 17 significant digits. Identical inputs give byte-identical text.
 */

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

#include <json.hpp>

#include "charmax/chargroup.hpp"
#include "charmax/delta.hpp"
#include "charmax/discrepancy.hpp"
#include "charmax/numtheory.hpp"
#include "charmax/pipeline.hpp"
#include "charmax/rearrangement.hpp"

namespace charmax {

using Json = nlohmann::ordered_json;

namespace detail {

inline void dump17_into(std::ostringstream& os, const Json& j, int indent, int depth) {
    auto newline = [&](int d) {
        if (indent < 0) return;
        os << '\n' << std::string(static_cast<std::size_t>(indent * d), ' ');
    };
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            os << '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) os << ',';
                first = false;
                newline(depth + 1);
                os << Json(it.key()).dump() << (indent < 0 ? ":" : ": ");
                dump17_into(os, it.value(), indent, depth + 1);
            }
            newline(depth);
            os << '}';
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                return;
            }
            os << '[';
            bool first = true;
            for (const auto& v : j) {
                if (!first) os << ',';
                first = false;
                newline(depth + 1);
                dump17_into(os, v, indent, depth + 1);
            }
            newline(depth);
            os << ']';
            return;
        }
        case Json::value_t::number_float: {
            double d = j.get<double>();
            if (!std::isfinite(d)) {
                os << "null";
                return;
            }
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", d);
            os << buf;
            return;
        }
        default:
            os << j.dump();
    }
}

} // namespace detail

/// Serializes with %.17g doubles. indent < 0 gives a single line.
inline std::string dump17(const Json& j, int indent = 2) {
    std::ostringstream os;
    detail::dump17_into(os, j, indent, 0);
    return os.str();
}

inline Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Json to_json(const CoefficientVector& v) {
    Json entries = Json::array();
    for (const auto& e : v.entries()) entries.push_back(Json{{"index", e.index}, {"value", complex_json(e.value)}});
    return Json{{"entries", entries}, {"norm2", v.norm()}};
}

inline Json to_json(const PrimePair& pp) {
    return Json{{"p", pp.p}, {"q", pp.q}, {"exponent_achieved", pp.ratio_exponent}};
}

inline Json to_json(const MaximalReport& r) {
    Json points = Json::array();
    for (const auto& pm : r.point_maxima) points.push_back(Json{{"x", pm.x}, {"max", pm.max}, {"argmax", pm.argmax}});
    return Json{{"points", points}, {"l2_average", r.l2_average}, {"ratio", r.ratio}};
}

inline Json to_json(const DeltaEstimate& d) {
    Json j{{"N", d.N}, {"value", d.value}, {"kind", to_string(d.kind)}, {"method", d.method}};
    j["witness_coeffs"] = d.witness_coeffs ? to_json(*d.witness_coeffs) : Json(nullptr);
    j["witness_assignment"] = d.witness_assignment ? Json(*d.witness_assignment) : Json(nullptr);
    if (!d.trace.empty()) j["trace"] = d.trace;
    return j;
}

inline Json to_json(const BadOrderWitness& w) {
    return Json{{"N", w.N},
                {"M", w.M},
                {"sigma", w.sigma},
                {"b", to_json(w.b)},
                {"threshold", w.threshold},
                {"level_mass", w.level_mass},
                {"score", w.score},
                {"candidates", w.candidates}};
}

inline Json to_json(const DiscrepancyReport& r) {
    return Json{{"s", r.s},
                {"q", r.q},
                {"p", r.p},
                {"m", r.m},
                {"etk_bound", r.etk_bound},
                {"empirical_lower", r.empirical_lower},
                {"covered", r.covered},
                {"missing_count", r.missing_count},
                {"coverage_target", r.target},
                {"term_inverse_m", r.term_inverse_m},
                {"term_weil", r.term_weil}};
}

inline Json to_json(const IdentityCheck& id) {
    return Json{{"name", id.name}, {"lhs", id.lhs}, {"rhs", id.rhs}, {"abs_error", id.abs_error}};
}

inline Json to_json(const CounterexampleReport& r) {
    Json ids = Json::array();
    for (const auto& id : r.identities) ids.push_back(to_json(id));
    return Json{{"p", r.p},
                {"q", r.q},
                {"s", r.s},
                {"s_attempted", r.s_attempted},
                {"sigma", r.sigma},
                {"b", to_json(r.b)},
                {"g", r.g},
                {"nu_A_g", r.nu_A_g},
                {"support", r.support},
                {"identities", ids},
                {"nu_linearity", r.nu_linearity},
                {"search_score", r.search_score},
                {"level_mass", r.level_mass},
                {"delta_lower_bound", r.delta_lower_bound},
                {"delta_ratio_check", r.delta_ratio_check},
                {"rm_ceiling", r.rm_ceiling},
                {"reference_scale", r.reference_scale}};
}

inline Json to_json(const ReductionReport& r) {
    return Json{{"p", r.p},
                {"k", r.k},
                {"nu2", r.nu2},
                {"L", r.L},
                {"M", r.M},
                {"order_of_two", r.order_of_two},
                {"chain_values", Json::array({r.chain_values[0], r.chain_values[1], r.chain_values[2], r.chain_values[3]})},
                {"max_relative_gap", r.max_relative_gap},
                {"m_divides", r.m_divides},
                {"coprime", r.coprime},
                {"m_exceeds_log", r.m_exceeds_log},
                {"m_is_order", r.m_is_order},
                {"relabel_multiset", r.relabel_multiset}};
}

/// Reads a coefficient vector written by to_json(CoefficientVector).
inline CoefficientVector coefficients_from_json(const Json& j) {
    std::vector<CoefficientEntry> entries;
    for (const auto& e : j.at("entries"))
        entries.push_back({e.at("index").get<u64>(), {e.at("value").at(0).get<double>(), e.at("value").at(1).get<double>()}});
    return CoefficientVector(std::move(entries));
}

} // namespace charmax
