#pragma once

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spdc/config.hpp"
#include "spdc/errors.hpp"
#include "spdc/filter.hpp"
#include "spdc/grid.hpp"
#include "spdc/hom.hpp"
#include "spdc/jsa.hpp"
#include "spdc/phase_matching.hpp"
#include "spdc/pump.hpp"
#include "spdc/rates.hpp"
#include "spdc/schmidt.hpp"
#include "spdc/source.hpp"

namespace spdc {

// Calibrated, not measured: the phase-matching ridge is fitted so the 0.2-nm and 5-nm pump
// presets give purities 0.86 and 0.98 inside the 20-GHz channels (tools/spdc_calibrate), and
// the efficiency ratio so the 1-nm preset gives a 0.655 HOM visibility.
inline constexpr double kCalibratedPmfThetaDeg = 45.0;
inline constexpr double kCalibratedPmfFwhmGhz = 22.99;
inline constexpr double kCalibratedAcceptanceGhz = 4000.0;
inline constexpr double kCalibratedEfficiencyRatio = 0.0177372;

inline constexpr double kSignalCenterNm = 1555.1;
inline constexpr double kIdlerCenterNm = 1547.1;
inline constexpr double kFundamentalCenterNm = 1551.1;
inline constexpr std::size_t kDefaultGridPoints = 256;
inline constexpr std::size_t kDefaultDelayPoints = 801;

inline PhaseMatching calibrated_phase_matching() {
    return PhaseMatching(AngleModel{kCalibratedPmfThetaDeg, kCalibratedPmfFwhmGhz}, PmfProfile::sinc,
                         kCalibratedAcceptanceGhz);
}

struct GridSpec {
    double signal_center_nm = kSignalCenterNm;
    double idler_center_nm = kIdlerCenterNm;
    std::size_t signal_points = kDefaultGridPoints;
    std::size_t idler_points = kDefaultGridPoints;
    std::optional<double> signal_half_span_ghz;  // empty: chosen from the filters
    std::optional<double> idler_half_span_ghz;
};

struct DelayScan {
    std::optional<double> min_ps;  // both empty: derived from the grid spacing
    std::optional<double> max_ps;
    std::size_t points = kDefaultDelayPoints;
};

struct ScenarioConfig {
    std::string name = "custom";
    PumpEnvelope pump;
    PhaseMatching phase_matching = calibrated_phase_matching();
    GridSpec grid;
    FilterChain signal_filters;
    FilterChain idler_filters;
    FilterChain detection_filters;  // in front of both beam-splitter output detectors
    FilterChain wcp_filters;
    bool wcp_detection_filtered = true;
    double mu = 0.01;
    double pair_probability = 0.01;
    Arm heralding_arm = Arm::signal;
    DelayScan delays;
    NoiseModel noise{NoiseModel::Kind::accidentals, kCalibratedEfficiencyRatio, 0.0, 1.0};
    std::optional<std::string> output_dir;

    Arm interfering_arm() const { return partner_of(heralding_arm); }

    /// Filters seen by the photon on `arm`, including the detection filters on the interfering arm.
    FilterChain chain(Arm arm) const {
        FilterChain out = arm == Arm::signal ? signal_filters : idler_filters;
        if (arm == interfering_arm()) out.insert(out.end(), detection_filters.begin(), detection_filters.end());
        return out;
    }

    /// Spectrum of the WCP photons that reach the detectors, before normalization.
    FilterChain wcp_chain() const {
        FilterChain out = wcp_filters;
        if (wcp_detection_filtered) out.insert(out.end(), detection_filters.begin(), detection_filters.end());
        return out;
    }
};

namespace detail {

using config::json;
using config::ObjectReader;

inline FilterShape parse_filter_shape(const std::string& s, const std::string& where) {
    if (s == "flat") return FilterShape::flat;
    if (s == "gaussian") return FilterShape::gaussian;
    if (s == "lorentzian") return FilterShape::lorentzian;
    if (s == "supergaussian") return FilterShape::supergaussian;
    throw ConfigError(where + ": unknown filter shape '" + s + "'");
}

inline FilterSpec parse_filter(const json& j, const std::string& path, double carrier_nm) {
    ObjectReader r(j, path);
    FilterSpec f;
    f.shape = parse_filter_shape(r.string("shape"), r.where("shape"));
    if (f.shape != FilterShape::flat) f.fwhm_ghz = r.positive("fwhm_ghz");
    if (r.has("center_ghz") && r.has("center_nm")) {
        throw ConfigError(path + ": give center_ghz or center_nm, not both");
    }
    f.center_ghz = r.has("center_nm") ? FilterSpec::detuning_of(r.positive("center_nm"), carrier_nm)
                                      : r.number("center_ghz", 0.0);
    if (f.shape == FilterShape::supergaussian) f.order = static_cast<int>(r.integer("order", 3));
    if (r.has("peak") && r.has("insertion_loss_db")) {
        throw ConfigError(path + ": give peak or insertion_loss_db, not both");
    }
    if (r.has("insertion_loss_db")) {
        const double db = r.number("insertion_loss_db");
        if (db < 0.0) throw ConfigError(r.where("insertion_loss_db") + " must be non-negative");
        f.peak = std::pow(10.0, -db / 20.0);
    } else {
        f.peak = r.positive("peak", 1.0);
    }
    r.finish();
    try {
        f.validate();
    } catch (const InvalidParameter& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return f;
}

inline FilterChain parse_chain(const json& j, const std::string& path, double carrier_nm) {
    FilterChain out;
    if (j.is_object()) {
        out.push_back(parse_filter(j, path, carrier_nm));
    } else if (j.is_array()) {
        for (std::size_t k = 0; k < j.size(); ++k) {
            out.push_back(parse_filter(j[k], path + "[" + std::to_string(k) + "]", carrier_nm));
        }
    } else if (!j.is_null()) {
        throw ConfigError(path + " must be a filter object or a list of them");
    }
    return out;
}

inline PumpEnvelope parse_pump(const json& j) {
    ObjectReader r(j, "pump");
    const int given = int(r.has("fundamental_filter_nm")) + int(r.has("fwhm_ghz")) + int(r.has("fwhm_nm"));
    if (given != 1) {
        throw ConfigError("pump: give exactly one of fundamental_filter_nm, fwhm_ghz, fwhm_nm");
    }
    PumpEnvelope p;
    if (r.has("fundamental_filter_nm")) {
        const double center = r.positive("fundamental_center_nm", kFundamentalCenterNm);
        p = shg_pump_from_fundamental(r.positive("fundamental_filter_nm"), center,
                                      r.positive("shg_multiplier", std::numbers::sqrt2));
    } else {
        p.center_nm = r.positive("center_nm", kFundamentalCenterNm / 2.0);
        p.fwhm = r.has("fwhm_ghz") ? Bandwidth::ghz(r.positive("fwhm_ghz"))
                                   : Bandwidth::nm(r.positive("fwhm_nm"));
    }
    const auto shape = r.string("shape", "gaussian");
    if (shape == "gaussian") {
        p.shape = PulseShape::gaussian;
    } else if (shape == "sech2") {
        p.shape = PulseShape::sech2;
    } else {
        throw ConfigError("pump.shape: unknown pulse shape '" + shape + "'");
    }
    p.offset_ghz = r.number("offset_ghz", 0.0);
    r.finish();
    return p;
}

inline PhaseMatching parse_phase_matching(const json& j) {
    ObjectReader r(j, "phase_matching");
    if (r.has("preset")) {
        const auto name = r.string("preset");
        r.finish();
        if (name != "calibrated") throw ConfigError("phase_matching.preset: unknown preset '" + name + "'");
        return calibrated_phase_matching();
    }
    const auto profile_name = r.string("profile", "sinc");
    PmfProfile profile;
    if (profile_name == "sinc") {
        profile = PmfProfile::sinc;
    } else if (profile_name == "gaussian") {
        profile = PmfProfile::gaussian;
    } else {
        throw ConfigError("phase_matching.profile: unknown profile '" + profile_name + "'");
    }
    const double acceptance =
        r.optional_positive("acceptance_fwhm_ghz").value_or(std::numeric_limits<double>::infinity());
    const auto model = r.string("model");
    PhaseMatching::Model m;
    if (model == "angle") {
        m = AngleModel{r.number("theta_deg"), r.positive("fwhm_ghz")};
    } else if (model == "taylor") {
        m = TaylorModel{r.positive("length_mm"), r.number("signal_delay_ps_per_mm"),
                        r.number("idler_delay_ps_per_mm"), r.number("gvd_ps2_per_mm", 0.0)};
    } else {
        throw ConfigError("phase_matching.model: unknown model '" + model + "'");
    }
    r.finish();
    return PhaseMatching(m, profile, acceptance);
}

inline std::size_t parse_count(ObjectReader& r, const std::string& key, std::size_t fallback,
                               std::size_t minimum) {
    const long n = r.integer(key, static_cast<long>(fallback));
    if (n < static_cast<long>(minimum)) {
        throw ConfigError(r.where(key) + " must be at least " + std::to_string(minimum));
    }
    return static_cast<std::size_t>(n);
}

inline GridSpec parse_grid(const json& j) {
    ObjectReader r(j, "grid");
    GridSpec g;
    g.signal_center_nm = r.positive("signal_center_nm", kSignalCenterNm);
    g.idler_center_nm = r.positive("idler_center_nm", kIdlerCenterNm);
    const std::size_t n = parse_count(r, "points", kDefaultGridPoints, 8);
    g.signal_points = parse_count(r, "signal_points", n, 8);
    g.idler_points = parse_count(r, "idler_points", n, 8);
    g.signal_half_span_ghz = r.optional_positive("signal_half_span_ghz");
    g.idler_half_span_ghz = r.optional_positive("idler_half_span_ghz");
    r.finish();
    return g;
}

inline DelayScan parse_delays(const json& j) {
    ObjectReader r(j, "delay");
    DelayScan d;
    if (r.has("min_ps") != r.has("max_ps")) throw ConfigError("delay: give both min_ps and max_ps");
    if (r.has("min_ps")) {
        d.min_ps = r.number("min_ps");
        d.max_ps = r.number("max_ps");
        if (!(*d.max_ps > *d.min_ps)) throw ConfigError("delay: max_ps must exceed min_ps");
    }
    if (r.has("step_ps")) {
        if (!d.min_ps) throw ConfigError("delay.step_ps needs min_ps and max_ps");
        if (r.has("points")) throw ConfigError("delay: give points or step_ps, not both");
        const double step = r.positive("step_ps");
        d.points = static_cast<std::size_t>(std::floor((*d.max_ps - *d.min_ps) / step + 1e-9)) + 1;
        if (d.points < 3) throw ConfigError("delay.step_ps leaves fewer than three delays");
        d.max_ps = *d.min_ps + step * static_cast<double>(d.points - 1);
    } else {
        d.points = parse_count(r, "points", kDefaultDelayPoints, 3);
    }
    r.finish();
    return d;
}

inline NoiseModel parse_noise(const json& j) {
    ObjectReader r(j, "noise");
    NoiseModel n{NoiseModel::Kind::accidentals, kCalibratedEfficiencyRatio, 0.0, 1.0};
    const auto model = r.string("model", "accidentals");
    if (model == "none") {
        n.kind = NoiseModel::Kind::none;
    } else if (model != "accidentals") {
        throw ConfigError("noise.model: unknown model '" + model + "'");
    }
    n.efficiency_ratio = r.positive("efficiency_ratio", kCalibratedEfficiencyRatio);
    n.dark_count = r.number("dark_count", 0.0);
    n.mode_match = r.positive("mode_match", 1.0);
    r.finish();
    try {
        n.validate();
    } catch (const InvalidParameter& e) {
        throw ConfigError(std::string("noise: ") + e.what());
    }
    return n;
}

}  // namespace detail

/// Builds a scenario from its JSON document; unknown keys anywhere are rejected.
inline ScenarioConfig parse_scenario(const nlohmann::json& doc) {
    using detail::ObjectReader;
    ObjectReader r(doc, "");
    ScenarioConfig c;
    c.name = r.string("name", "custom");
    if (!r.has("pump")) throw ConfigError("pump is required");
    c.pump = detail::parse_pump(r.raw("pump"));
    if (r.has("phase_matching")) c.phase_matching = detail::parse_phase_matching(r.raw("phase_matching"));
    if (r.has("grid")) c.grid = detail::parse_grid(r.raw("grid"));
    if (r.has("heralding_arm")) {
        const auto arm = r.string("heralding_arm");
        if (arm == "signal") {
            c.heralding_arm = Arm::signal;
        } else if (arm == "idler") {
            c.heralding_arm = Arm::idler;
        } else {
            throw ConfigError("heralding_arm must be signal or idler");
        }
    }
    const double interfering_carrier =
        c.interfering_arm() == Arm::signal ? c.grid.signal_center_nm : c.grid.idler_center_nm;
    if (r.has("filters")) {
        ObjectReader f(r.raw("filters"), "filters");
        if (f.has("signal")) c.signal_filters = detail::parse_chain(f.raw("signal"), "filters.signal", c.grid.signal_center_nm);
        if (f.has("idler")) c.idler_filters = detail::parse_chain(f.raw("idler"), "filters.idler", c.grid.idler_center_nm);
        if (f.has("detection")) {
            c.detection_filters = detail::parse_chain(f.raw("detection"), "filters.detection", interfering_carrier);
        }
        f.finish();
    }
    if (r.has("wcp")) {
        ObjectReader w(r.raw("wcp"), "wcp");
        c.mu = w.positive("mu", 0.01);
        if (c.mu > 1.0) throw ConfigError("wcp.mu must not exceed 1");
        if (w.has("filters")) c.wcp_filters = detail::parse_chain(w.raw("filters"), "wcp.filters", interfering_carrier);
        c.wcp_detection_filtered = w.boolean("detection_filtered", true);
        w.finish();
    }
    c.pair_probability = r.positive("pair_probability", 0.01);
    if (c.pair_probability > 0.1) throw ConfigError("pair_probability must not exceed 0.1");
    if (r.has("delay")) c.delays = detail::parse_delays(r.raw("delay"));
    if (r.has("noise")) c.noise = detail::parse_noise(r.raw("noise"));
    if (r.has("output")) {
        ObjectReader o(r.raw("output"), "output");
        c.output_dir = o.string("dir");
        o.finish();
    }
    r.finish();
    try {
        c.pump.validate();
    } catch (const InvalidParameter& e) {
        throw ConfigError(std::string("pump: ") + e.what());
    }
    return c;
}

/// Built-in scenarios reproducing the measured configurations.
///
/// 20-GHz channel filters are third-order super-Gaussians, the tunable gratings 4-GHz
/// Gaussians with 1.5 dB insertion loss.
inline nlohmann::json preset_document(std::string_view name) {
    using nlohmann::json;
    const json wdm = {{"shape", "supergaussian"}, {"fwhm_ghz", 20.0}, {"order", 3}};
    const json fbg = {{"shape", "gaussian"}, {"fwhm_ghz", 4.0}, {"insertion_loss_db", 1.5}};
    const auto pumped = [&](const char* id, double fundamental_nm) {
        return json{{"name", id},
                    {"pump", {{"fundamental_filter_nm", fundamental_nm}}},
                    {"phase_matching", {{"preset", "calibrated"}}},
                    {"filters", {{"signal", json::array({wdm})}, {"idler", json::array({wdm})}}},
                    {"wcp", {{"mu", 0.01}, {"filters", json::array({wdm})}}},
                    {"pair_probability", 0.01}};
    };
    if (name == "paper_fig2b") return pumped("paper_fig2b", 0.2);
    if (name == "paper_fig2c") return pumped("paper_fig2c", 5.0);
    if (name == "fig3b") return pumped("fig3b", 1.0);
    if (name == "fig3d") return pumped("fig3d", 4.0);
    if (name == "fig3c") {
        auto doc = pumped("fig3c", 1.0);
        doc["filters"]["signal"].push_back(fbg);
        doc["filters"]["detection"] = json::array({fbg});
        return doc;
    }
    // Gaussian pump along nu_s + nu_i and Gaussian phase matching along nu_s - nu_i with the
    // same width in rotated coordinates: a product state. The WCP filter matches the idler.
    if (name == "separable") {
        return json{{"name", "separable"},
                    {"pump", {{"fwhm_ghz", 100.0}}},
                    {"phase_matching",
                     {{"model", "angle"}, {"theta_deg", -45.0}, {"fwhm_ghz", 100.0 / std::numbers::sqrt2},
                      {"profile", "gaussian"}}},
                    {"wcp", {{"mu", 0.01}, {"filters", json::array({{{"shape", "gaussian"}, {"fwhm_ghz", 50.0}}})}}},
                    {"noise", {{"model", "none"}}}};
    }
    if (name == "correlated_gaussian") {
        return json{{"name", "correlated_gaussian"},
                    {"pump", {{"fwhm_ghz", 40.0}}},
                    {"grid", {{"points", 512}}},
                    {"phase_matching",
                     {{"model", "angle"}, {"theta_deg", -45.0}, {"fwhm_ghz", 200.0}, {"profile", "gaussian"}}},
                    {"wcp", {{"mu", 0.01}, {"filters", json::array({{{"shape", "gaussian"}, {"fwhm_ghz", 40.0}}})}}}};
    }
    throw ConfigError("unknown preset '" + std::string(name) + "'");
}

inline std::vector<std::string> preset_names() {
    return {"paper_fig2b", "paper_fig2c", "fig3b", "fig3c", "fig3d", "separable", "correlated_gaussian"};
}

inline ScenarioConfig load_preset(std::string_view name) { return parse_scenario(preset_document(name)); }

/// Half-span used when the config leaves it open: three times the narrowest filter on the arm,
/// or three times the wider of pump and phase matching when the arm is unfiltered.
inline double auto_half_span_ghz(const ScenarioConfig& c, Arm arm) {
    const double narrow = narrowest_fwhm_ghz(c.chain(arm));
    if (narrow > 0.0) return 3.0 * narrow;
    double width = c.pump.fwhm_ghz();
    const double pm = c.phase_matching.ridge_width_ghz();
    if (std::isfinite(pm)) width = std::max(width, pm);
    return 3.0 * width;
}

inline FrequencyGrid make_grid(const ScenarioConfig& c) {
    const double s_half = c.grid.signal_half_span_ghz.value_or(auto_half_span_ghz(c, Arm::signal));
    const double i_half = c.grid.idler_half_span_ghz.value_or(auto_half_span_ghz(c, Arm::idler));
    return FrequencyGrid::symmetric(c.grid.signal_center_nm, c.grid.idler_center_nm, s_half, i_half,
                                    c.grid.signal_points, c.grid.idler_points);
}

/// Delays at which the HOM curve is sampled. By default the scan covers 90% of the range the
/// interfering-arm grid resolves without aliasing.
inline std::vector<double> delay_values(const ScenarioConfig& c, const FrequencyGrid& grid) {
    double lo = 0.0, hi = 0.0;
    if (c.delays.min_ps) {
        lo = *c.delays.min_ps;
        hi = *c.delays.max_ps;
    } else {
        hi = 0.9 * 0.5 / (grid.step(c.interfering_arm()) * kGhzTimesPs);
        lo = -hi;
    }
    const std::size_t n = c.delays.points;
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    }
    return out;
}

struct SpectralResult {
    FrequencyGrid grid;
    JointSpectralAmplitude jsa;       // unfiltered, normalized
    FilteredJsa filtered;             // after all filters on both arms
    SchmidtResult schmidt;            // of the filtered amplitude
};

inline SpectralResult evaluate_spectrum(const ScenarioConfig& c, Diagnostics* diag = nullptr) {
    auto grid = make_grid(c);
    const SpdcSource source(c.pump, c.phase_matching);
    auto jsa = source.jsa(grid, diag);
    const auto s_chain = c.chain(Arm::signal);
    const auto i_chain = c.chain(Arm::idler);
    auto filtered = apply_filters(jsa, s_chain, i_chain, diag);
    auto schmidt = schmidt_decompose(filtered.jsa);
    return SpectralResult{std::move(grid), std::move(jsa), std::move(filtered), std::move(schmidt)};
}

struct HomResult {
    HeraldedState state;
    WcpSource wcp;
    PhotonBudget budget;
    HomCurve curve;
};

/// Transmissions of pairs and WCP photons through the configured filters.
inline PhotonBudget photon_budget(const ScenarioConfig& c, const SpectralResult& s,
                                  const HeraldedState& state) {
    const SpdcSource source(c.pump, c.phase_matching);
    const double total = source.total_emission();
    const auto s_chain = c.chain(Arm::signal);
    const auto i_chain = c.chain(Arm::idler);
    const Arm herald = c.heralding_arm;
    const Arm partner = c.interfering_arm();
    PhotonBudget b;
    b.pair_transmission = source.pair_emission(s_chain, i_chain, s.grid) / total;
    b.herald_transmission = source.arm_emission(c.chain(herald), herald, s.grid) / total;
    b.interfering_transmission = source.arm_emission(c.chain(partner), partner, s.grid) / total;
    const auto& axis = s.grid.axis(partner);
    const auto t_source = sample(c.wcp_filters, axis);
    const auto t_all = sample(c.wcp_chain(), axis);
    double passed = 0.0, launched = 0.0;
    for (std::size_t k = 0; k < axis.size(); ++k) {
        passed += t_all[k] * t_all[k];
        launched += t_source[k] * t_source[k];
    }
    if (!(launched > 0.0)) throw DegenerateInput("WCP filters block the whole axis");
    b.wcp_transmission = passed / launched;
    b.heralded_purity = (state.density * state.density).trace().real();
    return b;
}

inline HomResult evaluate_hom(const ScenarioConfig& c, const SpectralResult& s) {
    const auto s_chain = c.chain(Arm::signal);
    const auto i_chain = c.chain(Arm::idler);
    auto state = heralded_state(s.jsa, s_chain, i_chain, c.heralding_arm);
    auto wcp = WcpSource::filtered_laser(c.wcp_chain(), s.grid.axis(c.interfering_arm()), c.mu);
    auto budget = photon_budget(c, s, state);
    const auto delays = delay_values(c, s.grid);
    auto curve = hom_curve(state.density, budget, wcp, c.pair_probability, delays, c.noise);
    return HomResult{std::move(state), std::move(wcp), budget, std::move(curve)};
}

inline RateEstimate evaluate_rate(const ScenarioConfig& c, const HomResult& h) {
    return rate_estimate(c.name, h.budget, c.pair_probability, c.mu);
}

}  // namespace spdc
