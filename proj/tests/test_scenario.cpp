#include <gtest/gtest.h>

#include <cmath>

#include "spdc/report.hpp"
#include "spdc/scenario.hpp"

using namespace spdc;
using nlohmann::json;

namespace {

json minimal() { return json{{"pump", {{"fwhm_ghz", 100.0}}}}; }

std::string config_error(const json& doc) {
    try {
        parse_scenario(doc);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Scenario, MinimalDefaults) {
    const auto c = parse_scenario(minimal());
    EXPECT_EQ(c.name, "custom");
    EXPECT_DOUBLE_EQ(c.pair_probability, 0.01);
    EXPECT_DOUBLE_EQ(c.mu, 0.01);
    EXPECT_DOUBLE_EQ(c.pump.fwhm_ghz(), 100.0);
    EXPECT_EQ(c.heralding_arm, Arm::signal);
    EXPECT_TRUE(c.wcp_detection_filtered);
    EXPECT_DOUBLE_EQ(c.noise.efficiency_ratio, kCalibratedEfficiencyRatio);
}

TEST(Scenario, AllPresetsParse) {
    for (const auto& name : preset_names()) {
        const auto c = load_preset(name);
        EXPECT_EQ(c.name, name);
    }
    EXPECT_THROW(load_preset("nope"), ConfigError);
}

TEST(Scenario, UnknownKeysRejectedAtEveryLevel) {
    auto doc = minimal();
    doc["bogus"] = 1;
    EXPECT_NE(config_error(doc).find("bogus"), std::string::npos);
    doc = minimal();
    doc["pump"]["colour"] = "green";
    EXPECT_NE(config_error(doc).find("pump: unknown key(s) colour"), std::string::npos);
    doc = minimal();
    doc["filters"] = {{"signal", {{{"shape", "gaussian"}, {"fwhm_ghz", 4.0}, {"q", 3}}}}};
    EXPECT_NE(config_error(doc).find("filters.signal[0]"), std::string::npos);
    doc = minimal();
    doc["noise"] = {{"model", "accidentals"}, {"ratio", 1.0}};
    EXPECT_NE(config_error(doc).find("ratio"), std::string::npos);
}

TEST(Scenario, PhysicalValuesMustBePositive) {
    for (const auto& [path, value] : std::vector<std::pair<std::string, json>>{
             {"pump.fwhm_ghz", -1.0},
             {"pair_probability", 0.0},
             {"pair_probability", 0.5},
             {"wcp.mu", -0.1},
             {"wcp.mu", 2.0},
             {"grid.signal_half_span_ghz", 0.0},
             {"grid.points", 4},
             {"noise.efficiency_ratio", 0.0},
             {"noise.mode_match", 1.5}}) {
        auto doc = minimal();
        config::set_path(doc, path, value);
        EXPECT_FALSE(config_error(doc).empty()) << path;
    }
}

TEST(Scenario, PumpSpecifiedExactlyOnce) {
    auto doc = minimal();
    doc["pump"]["fwhm_nm"] = 0.3;
    EXPECT_FALSE(config_error(doc).empty());
    EXPECT_FALSE(config_error(json{{"pump", json::object()}}).empty());
    EXPECT_FALSE(config_error(json::object()).empty());
}

TEST(Scenario, FundamentalFilterPump) {
    const auto c = parse_scenario(json{{"pump", {{"fundamental_filter_nm", 1.0}}}});
    EXPECT_NEAR(c.pump.fwhm_ghz(), std::sqrt(2.0) * bandwidth_nm_to_ghz(1.0, 1551.1), 1e-9);
    const auto flat = parse_scenario(json{{"pump", {{"fundamental_filter_nm", 1.0}, {"shg_multiplier", 1.0}}}});
    EXPECT_NEAR(flat.pump.fwhm_ghz(), bandwidth_nm_to_ghz(1.0, 1551.1), 1e-9);
}

TEST(Scenario, FilterParsing) {
    auto doc = minimal();
    doc["filters"] = {{"signal", {{"shape", "gaussian"}, {"fwhm_ghz", 4.0}, {"insertion_loss_db", 1.5}}},
                      {"idler", json::array({{{"shape", "supergaussian"}, {"fwhm_ghz", 20.0}},
                                             {{"shape", "lorentzian"}, {"fwhm_ghz", 8.0}, {"center_nm", 1547.2}}})}};
    const auto c = parse_scenario(doc);
    ASSERT_EQ(c.signal_filters.size(), 1u);
    EXPECT_NEAR(c.signal_filters[0].peak * c.signal_filters[0].peak, std::pow(10.0, -0.15), 1e-12);
    ASSERT_EQ(c.idler_filters.size(), 2u);
    EXPECT_EQ(c.idler_filters[0].order, 3);
    EXPECT_NEAR(c.idler_filters[1].center_ghz, wavelength_nm_to_ghz(1547.2) - wavelength_nm_to_ghz(1547.1), 1e-9);
    doc["filters"]["signal"]["shape"] = "triangle";
    EXPECT_FALSE(config_error(doc).empty());
}

TEST(Scenario, DetectionFiltersJoinInterferingArm) {
    const auto c = load_preset("fig3c");
    EXPECT_EQ(c.chain(Arm::signal).size(), 2u);
    EXPECT_EQ(c.chain(Arm::idler).size(), 2u);
    EXPECT_EQ(c.wcp_chain().size(), 2u);
    auto doc = preset_document("fig3c");
    doc["wcp"]["detection_filtered"] = false;
    EXPECT_EQ(parse_scenario(doc).wcp_chain().size(), 1u);
}

TEST(Scenario, WcpFilterFlagChangesOnlyWcpBookkeeping) {
    const auto c = load_preset("fig3c");
    auto doc = preset_document("fig3c");
    doc["wcp"]["detection_filtered"] = false;
    const auto flipped = parse_scenario(doc);
    const auto s = evaluate_spectrum(c);
    const auto a = evaluate_hom(c, s);
    const auto b = evaluate_hom(flipped, evaluate_spectrum(flipped));
    EXPECT_LT(a.budget.wcp_transmission, 1.0);
    EXPECT_DOUBLE_EQ(b.budget.wcp_transmission, 1.0);
    EXPECT_NEAR(a.budget.heralded_purity, b.budget.heralded_purity, 1e-12);
}

TEST(Scenario, AutoGridFollowsNarrowestFilter) {
    const auto b = make_grid(load_preset("fig3b"));
    EXPECT_NEAR(b.signal().back(), 60.0, 1e-9);
    EXPECT_EQ(b.signal().size(), kDefaultGridPoints);
    const auto c = make_grid(load_preset("fig3c"));
    EXPECT_NEAR(c.signal().back(), 12.0, 1e-9);
    EXPECT_NEAR(c.idler().back(), 12.0, 1e-9);
    const auto s = make_grid(load_preset("separable"));
    EXPECT_NEAR(s.signal().back(), 300.0, 1e-9);
}

TEST(Scenario, ExplicitDelays) {
    auto doc = minimal();
    doc["delay"] = {{"min_ps", -10.0}, {"max_ps", 10.0}, {"step_ps", 0.5}};
    const auto c = parse_scenario(doc);
    const auto d = delay_values(c, make_grid(c));
    ASSERT_EQ(d.size(), 41u);
    EXPECT_DOUBLE_EQ(d.front(), -10.0);
    EXPECT_NEAR(d.back(), 10.0, 1e-12);
    doc["delay"] = {{"min_ps", 10.0}, {"max_ps", -10.0}};
    EXPECT_FALSE(config_error(doc).empty());
}

TEST(Scenario, AutoDelaysStayInsideUnambiguousRange) {
    const auto c = load_preset("fig3b");
    const auto g = make_grid(c);
    const auto d = delay_values(c, g);
    EXPECT_LT(d.back(), 0.5 / (g.idler_step() * kGhzTimesPs));
    EXPECT_DOUBLE_EQ(d.front(), -d.back());
}

TEST(SetPath, CreatesIntermediateObjects) {
    json doc = minimal();
    config::set_path(doc, "grid.points", 128);
    config::set_path(doc, "pump.fwhm_ghz", 50.0);
    EXPECT_EQ(doc["grid"]["points"], 128);
    EXPECT_EQ(doc["pump"]["fwhm_ghz"], 50.0);
    EXPECT_THROW(config::set_path(doc, "pump.fwhm_ghz.x", 1), ConfigError);
    EXPECT_THROW(config::set_path(doc, "a..b", 1), ConfigError);
}

TEST(Report, TwelveSignificantDigits) {
    EXPECT_EQ(report::number(1.0 / 3.0).dump(), "0.333333333333");
    EXPECT_TRUE(report::number(std::nan("")).is_null());
    EXPECT_EQ(report::dump(report::number(0.455386911136999997)), "0.455386911137\n");
    EXPECT_EQ(report::dump(json{{"a", json::array({1.0, 2, 1e-9})}, {"b", json::object()}}),
              "{\n  \"a\": [\n    1.0,\n    2,\n    1e-09\n  ],\n  \"b\": {}\n}\n");
    EXPECT_EQ(report::dump(std::nan("")), "null\n");
}

TEST(Report, DeterministicAcrossRuns) {
    const auto c = load_preset("fig3b");
    const auto a = report::schmidt(evaluate_spectrum(c).schmidt).dump();
    const auto b = report::schmidt(evaluate_spectrum(c).schmidt).dump();
    EXPECT_EQ(a, b);
}

TEST(Report, SchmidtJsonFields) {
    const auto j = report::schmidt(evaluate_spectrum(load_preset("paper_fig2c")).schmidt);
    for (const char* k : {"purity", "schmidt_number", "lambdas", "phase_blind", "rank_kept"}) EXPECT_TRUE(j.contains(k)) << k;
    EXPECT_FALSE(j["phase_blind"].get<bool>());
}
