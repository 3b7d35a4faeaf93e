#pragma once

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "spdc/errors.hpp"
#include "spdc/hom.hpp"
#include "spdc/rates.hpp"
#include "spdc/schmidt.hpp"

namespace spdc::report {

using nlohmann::json;

/// Rounds to 12 significant digits so reports are byte-stable; non-finite values become null.
inline json number(double v) {
    if (!std::isfinite(v)) return nullptr;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::stod(buf);
}

inline json numbers(const std::vector<double>& v) {
    json out = json::array();
    for (double x : v) out.push_back(number(x));
    return out;
}

inline json schmidt(const SchmidtResult& r, std::size_t max_lambdas = 50) {
    std::vector<double> lambdas(r.lambdas.begin(),
                                r.lambdas.begin() + static_cast<std::ptrdiff_t>(std::min(max_lambdas, r.lambdas.size())));
    json j{{"purity", number(r.purity)},
           {"schmidt_number", number(r.schmidt_number)},
           {"rank_kept", r.rank_kept},
           {"lambdas", numbers(lambdas)},
           {"phase_blind", r.phase_blind}};
    if (r.phase_blind) j["assumption"] = "flat spectral phase (amplitude = sqrt of intensity)";
    return j;
}

inline json hom(const HomCurve& c) {
    return json{{"visibility", number(c.visibility)},
                {"fwhm_ps", number(c.dip_fwhm_ps)},
                {"baseline", number(c.baseline)},
                {"dip_delay_ps", number(c.dip_delay_ps)},
                {"dip_minimum", number(c.dip_minimum)},
                {"reliable", c.reliable},
                {"warnings", c.warnings}};
}

inline json rate(const RateEstimate& r) {
    return json{{"id", r.id},
                {"factor", number(r.factor())},
                {"transmissions",
                 {{"signal", number(r.signal)},
                  {"heralding", number(r.heralding)},
                  {"idler", number(r.idler)},
                  {"wcp", number(r.wcp)}}},
                {"pair_probability", number(r.pair_probability)},
                {"mean_photon_number", number(r.mean_photon_number)}};
}

inline json rate_ratio(const RateRatio& r) {
    json j{{"numerator", rate(r.numerator)}, {"denominator", rate(r.denominator)}};
    if (r.measurable()) {
        j["ratio"] = number(*r.ratio);
    } else {
        j["ratio"] = nullptr;
        j["status"] = "unmeasurable";
        j["note"] = r.note;
    }
    return j;
}

inline void write_hom_csv(std::ostream& os, const HomCurve& c) {
    os << "delay_ps,coincidence\n";
    char buf[64];
    for (std::size_t k = 0; k < c.delays_ps.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", c.delays_ps[k], c.coincidence[k]);
        os << buf;
    }
}

namespace detail {

inline void emit(std::string& out, const json& j, int depth) {
    const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
    const std::string close(static_cast<std::size_t>(2 * depth), ' ');
    if (j.is_number_float() && !std::isfinite(j.get<double>())) {
        out += "null";
    } else if (j.is_number_float()) {
        char buf[32];
        const auto res = std::to_chars(buf, buf + sizeof buf, j.get<double>());
        std::string s(buf, res.ptr);
        if (s.find_first_of(".en") == std::string::npos) s += ".0";
        out += s;
    } else if (j.is_object() && !j.empty()) {
        out += "{\n";
        bool first = true;
        for (const auto& [k, v] : j.items()) {
            if (!first) out += ",\n";
            first = false;
            out += pad + json(k).dump() + ": ";
            emit(out, v, depth + 1);
        }
        out += "\n" + close + "}";
    } else if (j.is_array() && !j.empty()) {
        out += "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i > 0) out += ",\n";
            out += pad;
            emit(out, j[i], depth + 1);
        }
        out += "\n" + close + "]";
    } else {
        out += j.dump();
    }
}

}  // namespace detail

/// Like json::dump(2), but floats use the shortest round-trip form.
inline std::string dump(const json& j) {
    std::string out;
    detail::emit(out, j, 0);
    return out + "\n";
}

inline void write_json(std::ostream& os, const json& j) { os << dump(j); }

}  // namespace spdc::report
