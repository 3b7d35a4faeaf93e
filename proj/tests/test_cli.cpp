#include <gtest/gtest.h>
#include <sys/wait.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        std::random_device rd;
        dir_ = fs::temp_directory_path() / ("spdc_cli_" + std::to_string(rd()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    Outcome run(const std::string& args) const {
        const auto out = dir_ / "stdout.txt";
        const auto err = dir_ / "stderr.txt";
        const std::string cmd = std::string(SPDC_CLI_PATH) + " " + args + " > " + out.string() + " 2> " + err.string();
        const int status = std::system(cmd.c_str());
        return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
    }

    fs::path write(const std::string& name, const std::string& content) const {
        const auto p = dir_ / name;
        std::ofstream(p, std::ios::binary) << content;
        return p;
    }

    fs::path dir_;
};

}  // namespace

TEST_F(Cli, JsaPresetWritesFilesAndPurity) {
    const auto r = run("jsa --preset paper_fig2c --out " + (dir_ / "o").string());
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(slurp(dir_ / "o" / "paper_fig2c" / "schmidt.json"));
    EXPECT_NEAR(j["purity"].get<double>(), 0.98, 0.05);
    EXPECT_TRUE(fs::exists(dir_ / "o" / "paper_fig2c" / "jsa.csv"));
    EXPECT_EQ(json::parse(r.out)["purity"], j["purity"]);
}

TEST_F(Cli, SeparablePresetIsPure) {
    const auto r = run("jsa --preset separable");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(json::parse(r.out)["purity"].get<double>(), 1.0, 1e-6);
}

TEST_F(Cli, PumpWidthSweep) {
    const auto r = run("jsa --preset paper_fig2c --sweep pump.fundamental_filter_nm=0.2,1,2,4,5 --out " +
                       (dir_ / "o").string());
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream in(slurp(dir_ / "o" / "paper_fig2c" / "sweep.csv"));
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "pump.fundamental_filter_nm,purity,schmidt_number,heralding_transmission");
    std::vector<double> purity;
    while (std::getline(in, line)) {
        const auto a = line.find(',');
        purity.push_back(std::stod(line.substr(a + 1)));
    }
    ASSERT_EQ(purity.size(), 5u);
    for (std::size_t k = 1; k < purity.size(); ++k) EXPECT_GE(purity[k], purity[k - 1] - 1e-12);
}

TEST_F(Cli, IngestSyntheticNarrowPump) {
    const auto csv = dir_ / "fig2b.csv";
    const auto s = run("synth --preset paper_fig2b --set grid.points=61 --set grid.signal_half_span_ghz=30 "
                       "--set grid.idler_half_span_ghz=30 --counts 1e6 --seed 3 -o " + csv.string());
    ASSERT_EQ(s.code, 0) << s.err;
    const auto r = run("ingest " + csv.string() + " --out " + (dir_ / "o").string());
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_NEAR(j["purity"].get<double>(), 0.86, 0.05);
    EXPECT_TRUE(j["schmidt"]["phase_blind"].get<bool>());
    EXPECT_TRUE(fs::exists(dir_ / "o" / "fig2b" / "schmidt.json"));
}

TEST_F(Cli, IngestDuplicateCell) {
    const auto p = write("dup.csv", "nu_s_GHz,nu_i_GHz,counts\n0,0,1\n0,1,2\n1,0,3\n1,1,4\n0,1,5\n");
    const auto r = run("ingest " + p.string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("(0, 1)"), std::string::npos) << r.err;
}

TEST_F(Cli, IngestEmptyFile) {
    const auto p = write("empty.csv", "");
    const auto r = run("ingest " + p.string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("no records"), std::string::npos) << r.err;
}

TEST_F(Cli, IngestAllZeroIsDegenerate) {
    const auto p = write("zero.csv", "nu_s_GHz,nu_i_GHz,counts\n0,0,0\n0,1,0\n1,0,0\n1,1,0\n");
    EXPECT_EQ(run("ingest " + p.string()).code, 3);
}

TEST_F(Cli, HomBroadPumpPreset) {
    const auto r = run("hom --preset fig3d --out " + (dir_ / "o").string());
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(slurp(dir_ / "o" / "fig3d" / "hom.json"));
    EXPECT_NEAR(j["visibility"].get<double>(), 0.795, 0.10);
    EXPECT_TRUE(fs::exists(dir_ / "o" / "fig3d" / "hom.csv"));
}

TEST_F(Cli, HomIdealLimit) {
    const auto r = run("hom --preset separable");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(json::parse(r.out)["visibility"].get<double>(), 1.0, 1e-6);
}

TEST_F(Cli, HomShortScanMarkedUnreliable) {
    const auto r = run("hom --preset fig3c --set delay.min_ps=-100 --set delay.max_ps=100");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_FALSE(j["reliable"].get<bool>());
    EXPECT_FALSE(j["warnings"].empty());
}

TEST_F(Cli, RatesIdentity) {
    const auto r = run("rates --preset fig3b --preset fig3b");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_DOUBLE_EQ(json::parse(r.out)["ratio"].get<double>(), 1.0);
}

TEST_F(Cli, RatesGratingPenalty) {
    const auto r = run("rates --preset fig3b --preset fig3c --out " + (dir_ / "o").string());
    ASSERT_EQ(r.code, 0) << r.err;
    const double ratio = json::parse(slurp(dir_ / "o" / "fig3b" / "rates.json"))["ratio"].get<double>();
    EXPECT_GE(ratio, 120.0);
    EXPECT_LE(ratio, 12000.0);
}

TEST_F(Cli, RatesBroadPump) {
    const auto r = run("rates --preset fig3d --preset fig3b --format csv");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto comma = r.out.rfind(',');
    const double ratio = std::stod(r.out.substr(comma + 1));
    EXPECT_GE(ratio, 0.3);
    EXPECT_LE(ratio, 1.5);
}

TEST_F(Cli, ByteIdenticalReports) {
    ASSERT_EQ(run("hom --preset fig3b --out " + (dir_ / "a").string()).code, 0);
    ASSERT_EQ(run("hom --preset fig3b --out " + (dir_ / "b").string()).code, 0);
    EXPECT_EQ(slurp(dir_ / "a" / "fig3b" / "hom.json"), slurp(dir_ / "b" / "fig3b" / "hom.json"));
    EXPECT_EQ(slurp(dir_ / "a" / "fig3b" / "hom.csv"), slurp(dir_ / "b" / "fig3b" / "hom.csv"));
}

TEST_F(Cli, ValidationFailureWritesNothing) {
    const auto cfg = write("bad.json", R"({"name": "bad", "pump": {"fwhm_ghz": 100}, "extra": 1})");
    const auto r = run("jsa --config " + cfg.string() + " --out " + (dir_ / "o").string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("extra"), std::string::npos);
    EXPECT_FALSE(fs::exists(dir_ / "o"));
}

TEST_F(Cli, ConfigFileScenario) {
    const auto cfg = write("ok.json", R"({"name": "mine", "pump": {"fundamental_filter_nm": 5},
        "phase_matching": {"preset": "calibrated"},
        "filters": {"signal": {"shape": "supergaussian", "fwhm_ghz": 20, "order": 3},
                    "idler": {"shape": "supergaussian", "fwhm_ghz": 20, "order": 3}}})");
    const auto r = run("jsa --config " + cfg.string() + " --format csv");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.rfind("scenario,purity,heralding_transmission\nmine,", 0), 0u) << r.out;
}

TEST_F(Cli, UsageErrors) {
    EXPECT_EQ(run("jsa").code, 2);
    EXPECT_EQ(run("jsa --preset fig3b --config x.json").code, 2);
    EXPECT_EQ(run("bogus").code, 2);
    EXPECT_EQ(run("jsa --preset fig3b --format xml").code, 2);
    EXPECT_EQ(run("rates --preset fig3b").code, 2);
}

TEST_F(Cli, PresetListing) {
    const auto r = run("presets");
    ASSERT_EQ(r.code, 0);
    for (const char* p : {"paper_fig2b", "paper_fig2c", "fig3b", "fig3c", "fig3d"}) EXPECT_NE(r.out.find(p), std::string::npos);
    const auto doc = run("presets fig3c");
    EXPECT_NO_THROW(json::parse(doc.out));
}
