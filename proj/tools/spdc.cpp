// Command-line front end: presets, sweeps, JSI ingestion and reports.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "spdc/spdc.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace spdc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitValidation = 2;
constexpr int kExitDegenerate = 3;

struct ScenarioArgs {
    std::string preset;
    std::string config_path;
    std::vector<std::string> overrides;  // path=value
};

json parse_value(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error&) {
        return text;  // bare strings need no quotes
    }
}

std::pair<std::string, std::string> split_assignment(const std::string& s) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("expected path=value, got '" + s + "'");
    return {s.substr(0, eq), s.substr(eq + 1)};
}

json load_document(const ScenarioArgs& a) {
    if (a.preset.empty() == a.config_path.empty()) throw ConfigError("give exactly one of --preset or --config");
    json doc;
    if (!a.preset.empty()) {
        doc = preset_document(a.preset);
    } else {
        std::ifstream in(a.config_path);
        if (!in) throw ConfigError("cannot read config '" + a.config_path + "'");
        try {
            doc = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ConfigError(a.config_path + ": " + e.what());
        }
    }
    for (const auto& o : a.overrides) {
        const auto [path, value] = split_assignment(o);
        config::set_path(doc, path, parse_value(value));
    }
    return doc;
}

struct Sweep {
    std::string path;
    std::vector<json> values;
};

std::optional<Sweep> parse_sweep(const std::string& arg) {
    if (arg.empty()) return std::nullopt;
    const auto [path, list] = split_assignment(arg);
    Sweep s{path, {}};
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) throw ConfigError("empty value in --sweep list");
        s.values.push_back(parse_value(item));
    }
    if (s.values.empty()) throw ConfigError("--sweep needs at least one value");
    return s;
}

/// Files are collected in memory and written only after every computation succeeded.
class Output {
public:
    void add(fs::path relative, std::string content) { files_.emplace_back(std::move(relative), std::move(content)); }

    void commit(const std::optional<fs::path>& root) const {
        if (!root) return;
        for (const auto& [rel, content] : files_) {
            const auto path = *root / rel;
            fs::create_directories(path.parent_path());
            std::ofstream out(path, std::ios::binary);
            if (!out) throw Error("cannot write '" + path.string() + "'");
            out << content;
        }
    }

private:
    std::vector<std::pair<fs::path, std::string>> files_;
};

using report::dump;

std::optional<fs::path> output_root(const std::string& flag, const ScenarioConfig& c) {
    if (!flag.empty()) return fs::path(flag);
    if (c.output_dir) return fs::path(*c.output_dir);
    return std::nullopt;
}

std::string csv_value(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    const auto s = report::dump(v);
    return s.substr(0, s.size() - 1);
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

json spectral_report(const ScenarioConfig& c, const SpectralResult& s, const Diagnostics& d) {
    return json{{"scenario", c.name},
                {"provenance", to_string(s.jsa.provenance())},
                {"grid",
                 {{"signal_points", s.grid.signal().size()},
                  {"idler_points", s.grid.idler().size()},
                  {"signal_step_ghz", report::number(s.grid.signal_step())},
                  {"idler_step_ghz", report::number(s.grid.idler_step())}}},
                {"heralding_transmission", report::number(s.filtered.transmission)},
                {"schmidt", report::schmidt(s.schmidt)},
                {"purity", report::number(s.schmidt.purity)},
                {"warnings", d.warnings}};
}

int print_summary(const json& summary, const std::string& format, const std::vector<std::string>& csv_keys) {
    if (format == "csv") {
        std::string header, row;
        for (const auto& k : csv_keys) {
            header += (header.empty() ? "" : ",") + k;
            row += (row.empty() ? "" : ",") + csv_value(summary.value(k, json()));
        }
        std::cout << header << "\n" << row << "\n";
    } else {
        std::cout << dump(summary);
    }
    return kExitOk;
}

int cmd_jsa(const ScenarioArgs& args, const std::string& out_flag, const std::string& sweep_arg,
            const std::string& format) {
    const auto doc = load_document(args);
    const auto sweep = parse_sweep(sweep_arg);
    if (sweep) {
        const auto base = parse_scenario(doc);
        std::string csv = sweep->path + ",purity,schmidt_number,heralding_transmission\n";
        for (const auto& v : sweep->values) {
            auto point = doc;
            config::set_path(point, sweep->path, v);
            const auto c = parse_scenario(point);
            const auto s = evaluate_spectrum(c);
            csv += csv_value(v) + "," + fmt(s.schmidt.purity) + "," + fmt(s.schmidt.schmidt_number) + "," +
                   fmt(s.filtered.transmission) + "\n";
        }
        Output out;
        out.add(fs::path(base.name) / "sweep.csv", csv);
        out.commit(output_root(out_flag, base));
        std::cout << csv;
        return kExitOk;
    }
    const auto c = parse_scenario(doc);
    Diagnostics d;
    const auto s = evaluate_spectrum(c, &d);
    const auto summary = spectral_report(c, s, d);
    std::ostringstream jsa_csv;
    write_jsa_csv(jsa_csv, s.filtered.jsa);
    Output out;
    out.add(fs::path(c.name) / "jsa.csv", jsa_csv.str());
    out.add(fs::path(c.name) / "schmidt.json", dump(summary));
    out.commit(output_root(out_flag, c));
    return print_summary(summary, format, {"scenario", "purity", "heralding_transmission"});
}

json hom_report(const ScenarioConfig& c, const HomResult& h) {
    auto j = report::hom(h.curve);
    j["scenario"] = c.name;
    j["heralded_purity"] = report::number(h.budget.heralded_purity);
    j["efficiency_ratio"] = report::number(c.noise.efficiency_ratio);
    j["noise_model"] = c.noise.kind == NoiseModel::Kind::none ? "none" : "accidentals";
    j["mean_photon_number"] = report::number(c.mu);
    j["pair_probability"] = report::number(c.pair_probability);
    return j;
}

int cmd_hom(const ScenarioArgs& args, const std::string& out_flag, const std::string& sweep_arg,
            const std::string& format) {
    const auto doc = load_document(args);
    const auto sweep = parse_sweep(sweep_arg);
    if (sweep) {
        const auto base = parse_scenario(doc);
        std::string csv = sweep->path + ",visibility,fwhm_ps,reliable\n";
        for (const auto& v : sweep->values) {
            auto point = doc;
            config::set_path(point, sweep->path, v);
            const auto c = parse_scenario(point);
            const auto h = evaluate_hom(c, evaluate_spectrum(c));
            csv += csv_value(v) + "," + fmt(h.curve.visibility) + "," + fmt(h.curve.dip_fwhm_ps) + "," +
                   (h.curve.reliable ? "true" : "false") + "\n";
        }
        Output out;
        out.add(fs::path(base.name) / "sweep.csv", csv);
        out.commit(output_root(out_flag, base));
        std::cout << csv;
        return kExitOk;
    }
    const auto c = parse_scenario(doc);
    const auto h = evaluate_hom(c, evaluate_spectrum(c));
    const auto summary = hom_report(c, h);
    std::ostringstream curve;
    report::write_hom_csv(curve, h.curve);
    Output out;
    out.add(fs::path(c.name) / "hom.csv", curve.str());
    out.add(fs::path(c.name) / "hom.json", dump(summary));
    out.commit(output_root(out_flag, c));
    return print_summary(summary, format, {"scenario", "visibility", "fwhm_ps", "reliable"});
}

int cmd_rates(const std::vector<std::string>& presets, const std::vector<std::string>& configs,
              const std::vector<std::string>& overrides, const std::string& out_flag, const std::string& format) {
    std::vector<ScenarioArgs> sides;
    for (const auto& p : presets) sides.push_back({p, {}, overrides});
    for (const auto& f : configs) sides.push_back({{}, f, overrides});
    if (sides.size() != 2) throw ConfigError("rates needs exactly two configurations (--preset/--config)");
    std::vector<ScenarioConfig> cfg;
    std::vector<RateEstimate> est;
    for (const auto& s : sides) {
        cfg.push_back(parse_scenario(load_document(s)));
        const auto& c = cfg.back();
        est.push_back(evaluate_rate(c, evaluate_hom(c, evaluate_spectrum(c))));
    }
    const auto ratio = relative_threefold_rate(est[0], est[1]);
    const auto summary = report::rate_ratio(ratio);
    Output out;
    out.add(fs::path(cfg[0].name) / "rates.json", dump(summary));
    out.commit(output_root(out_flag, cfg[0]));
    if (format == "csv") {
        std::cout << "numerator,denominator,ratio\n"
                  << est[0].id << "," << est[1].id << "," << (ratio.measurable() ? fmt(*ratio.ratio) : "unmeasurable")
                  << "\n";
        return kExitOk;
    }
    std::cout << dump(summary);
    return kExitOk;
}

BackgroundMethod parse_background(const std::string& s) {
    if (s == "border" || s == "border_median") return BorderMedian{};
    if (s == "none") return FixedBackground{0.0};
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size() && v >= 0.0) return FixedBackground{v};
    } catch (const std::exception&) {
    }
    throw ConfigError("--background must be border, none or a non-negative number");
}

int cmd_ingest(const std::string& file, const std::string& background, double signal_nm, double idler_nm,
               const std::string& out_flag, const std::string& format) {
    const auto method = parse_background(background);
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ConfigError("cannot read '" + file + "'");
    const auto raw = parse_jsi(in, JsiParseOptions{signal_nm, idler_nm});
    const auto cleaned = subtract_background(raw, method);
    const auto jsa = jsi_to_amplitude(cleaned);
    const auto r = schmidt_decompose(jsa);
    const std::string id = fs::path(file).stem().string();
    json summary{{"input", id},
                 {"provenance", to_string(jsa.provenance())},
                 {"total_counts", report::number(raw.total_counts)},
                 {"background", report::number(cleaned.background)},
                 {"signal_points", raw.grid.signal().size()},
                 {"idler_points", raw.grid.idler().size()},
                 {"purity", report::number(r.purity)},
                 {"schmidt", report::schmidt(r)}};
    Output out;
    out.add(fs::path(id) / "schmidt.json", dump(summary));
    out.commit(out_flag.empty() ? std::nullopt : std::optional<fs::path>(out_flag));
    return print_summary(summary, format, {"input", "purity", "total_counts", "background"});
}

int cmd_synth(const ScenarioArgs& args, double counts, std::optional<std::uint64_t> seed, double background,
              const std::string& output) {
    const auto c = parse_scenario(load_document(args));
    const auto s = evaluate_spectrum(c);
    if (!(counts > 0.0)) throw ConfigError("--counts must be positive");
    if (!(background >= 0.0)) throw ConfigError("--background must be non-negative");
    const auto g = synthesize_jsi(normalize(s.filtered.jsa), counts, seed, background);
    std::ostringstream csv;
    write_jsi_csv(csv, g);
    if (output.empty() || output == "-") {
        std::cout << csv.str();
        return kExitOk;
    }
    const fs::path path(output);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + output + "'");
    out << csv.str();
    return kExitOk;
}

void add_scenario_options(CLI::App* cmd, ScenarioArgs& a) {
    cmd->add_option("--preset", a.preset, "built-in scenario name");
    cmd->add_option("--config", a.config_path, "scenario JSON file")->check(CLI::ExistingFile);
    cmd->add_option("--set", a.overrides, "override a config value: dotted.path=value");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SPDC joint-spectrum, purity, HOM and rate modeling"};
    app.require_subcommand(1);

    std::string out_dir, sweep, format = "json";
    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--format", format, "stdout summary format")->check(CLI::IsMember({"json", "csv"}));
    };

    ScenarioArgs scenario;
    auto* jsa = app.add_subcommand("jsa", "joint spectrum and Schmidt analysis");
    add_scenario_options(jsa, scenario);
    add_common(jsa);
    jsa->add_option("--sweep", sweep, "parameter sweep: dotted.path=v1,v2,...");

    auto* hom = app.add_subcommand("hom", "HOM dip with a weak coherent pulse");
    add_scenario_options(hom, scenario);
    add_common(hom);
    hom->add_option("--sweep", sweep, "parameter sweep: dotted.path=v1,v2,...");

    std::vector<std::string> rate_presets, rate_configs, rate_overrides;
    auto* rates = app.add_subcommand("rates", "relative three-fold rate of two configurations");
    rates->add_option("--preset", rate_presets, "built-in scenario (numerator first)");
    rates->add_option("--config", rate_configs, "scenario JSON file")->check(CLI::ExistingFile);
    rates->add_option("--set", rate_overrides, "override applied to both: dotted.path=value");
    add_common(rates);

    std::string ingest_file, background = "border";
    double signal_nm = kSignalCenterNm, idler_nm = kIdlerCenterNm;
    auto* ingest = app.add_subcommand("ingest", "purity of a measured JSI table");
    ingest->add_option("file", ingest_file, "CSV with nu_s_GHz,nu_i_GHz,counts")->required();
    ingest->add_option("--background", background, "border | none | counts per bin");
    ingest->add_option("--signal-center-nm", signal_nm);
    ingest->add_option("--idler-center-nm", idler_nm);
    add_common(ingest);

    double synth_counts = 1e6, synth_background = 0.0;
    std::optional<std::uint64_t> seed;
    std::string synth_output;
    auto* synth = app.add_subcommand("synth", "synthetic JSI table from a scenario");
    add_scenario_options(synth, scenario);
    synth->add_option("--counts", synth_counts, "expected total counts");
    synth->add_option("--seed", seed, "Poisson seed; without it counts are rounded expectations");
    synth->add_option("--background", synth_background, "flat background per bin");
    synth->add_option("--output,-o", synth_output, "CSV path, - for stdout");

    auto* presets = app.add_subcommand("presets", "list built-in scenarios or print one");
    std::string show;
    presets->add_option("name", show, "preset to print as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (*jsa) return cmd_jsa(scenario, out_dir, sweep, format);
        if (*hom) return cmd_hom(scenario, out_dir, sweep, format);
        if (*rates) return cmd_rates(rate_presets, rate_configs, rate_overrides, out_dir, format);
        if (*ingest) return cmd_ingest(ingest_file, background, signal_nm, idler_nm, out_dir, format);
        if (*synth) return cmd_synth(scenario, synth_counts, seed, synth_background, synth_output);
        if (*presets) {
            if (show.empty()) {
                for (const auto& n : preset_names()) std::cout << n << "\n";
            } else {
                std::cout << dump(preset_document(show));
            }
            return kExitOk;
        }
    } catch (const DegenerateInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const InvalidParameter& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const ShapeMismatch& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitOther;
    }
    return kExitOther;
}
