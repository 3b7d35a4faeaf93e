// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "spdc/spdc.hpp"

using namespace spdc;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o{false, {}};
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = dt < budget_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::printf("%s criterion %d: %s | %s | %.2f s (limit %.0f s)%s\n", pass ? "PASS" : "FAIL", id, title,
                o.detail.c_str(), dt, budget_s, in_time ? "" : " TIMEOUT");
    std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

FrequencyGrid grid_of(std::size_t ns, std::size_t ni, double half = 10.0) {
    return FrequencyGrid::symmetric(1555.1, 1547.1, half, half, ns, ni);
}

JointSpectralAmplitude random_jsa(std::mt19937_64& rng, std::size_t ns, std::size_t ni) {
    std::normal_distribution<double> n(0.0, 1.0);
    ComplexMatrix v(static_cast<Eigen::Index>(ns), static_cast<Eigen::Index>(ni));
    for (Eigen::Index r = 0; r < v.rows(); ++r)
        for (Eigen::Index c = 0; c < v.cols(); ++c) v(r, c) = {n(rng), n(rng)};
    return normalize(JointSpectralAmplitude(grid_of(ns, ni), v, Provenance::model));
}

double trace_purity(const ComplexMatrix& a) {
    const ComplexMatrix rho = a * a.adjoint();
    const double tr = rho.trace().real();
    return (rho * rho).trace().real() / (tr * tr);
}

struct Evaluated {
    ScenarioConfig config;
    SpectralResult spectrum;
    HomResult hom;
};

Evaluated run(const char* preset) {
    auto c = load_preset(preset);
    auto s = evaluate_spectrum(c);
    auto h = evaluate_hom(c, s);
    return {std::move(c), std::move(s), std::move(h)};
}

double visibility_with_ratio(const Evaluated& e, double r) {
    NoiseModel n = e.config.noise;
    n.efficiency_ratio = r;
    return hom_curve(e.hom.state.density, e.hom.budget, e.hom.wcp, e.config.pair_probability,
                     delay_values(e.config, e.spectrum.grid), n)
        .visibility;
}

}  // namespace

int main() {
    criterion(1, "separable-state exactness", 1.0, [] {
        std::mt19937_64 rng(1);
        std::normal_distribution<double> n(0.0, 1.0);
        double worst = 0.0;
        for (int t = 0; t < 10; ++t) {
            Eigen::VectorXcd f(48), h(40);
            for (auto& x : f) x = {n(rng), n(rng)};
            for (auto& x : h) x = {n(rng), n(rng)};
            const JointSpectralAmplitude jsa(grid_of(48, 40), f * h.transpose(), Provenance::model);
            worst = std::max(worst, std::abs(purity(jsa) - 1.0));
        }
        ComplexMatrix v = ComplexMatrix::Zero(32, 32);
        v(3, 7) = v(20, 11) = 1.0 / std::sqrt(2.0);
        const auto r = schmidt_decompose(JointSpectralAmplitude(grid_of(32, 32), v, Provenance::model));
        const bool two_mode = r.lambdas.size() == 2 && std::abs(r.lambdas[0] - 0.5) <= 1e-9 &&
                              std::abs(r.lambdas[1] - 0.5) <= 1e-9;
        return Outcome{worst <= 1e-6 && two_mode,
                       fmt("max |P-1| = %.2e", worst) + (two_mode ? ", lambdas = [0.5, 0.5]" : ", two-mode case wrong")};
    });

    criterion(2, "SVD purity equals brute-force trace oracle", 10.0, [] {
        std::mt19937_64 rng(2);
        std::uniform_int_distribution<std::size_t> size(8, 64);
        double worst_oracle = 0.0, worst_sym = 0.0;
        for (int t = 0; t < 60; ++t) {
            const auto jsa = random_jsa(rng, size(rng), size(rng));
            const ComplexMatrix a = jsa.weighted();
            worst_oracle = std::max(worst_oracle, std::abs(purity(jsa) - trace_purity(a)));
            const ComplexMatrix at = a.transpose();
            worst_sym = std::max(worst_sym, std::abs(trace_purity(a) - trace_purity(at)));
        }
        return Outcome{worst_oracle <= 1e-10 && worst_sym <= 1e-10,
                       "60 random JSAs: " + fmt("max |SVD - trace| = %.2e", worst_oracle) +
                           fmt(", max |signal - idler| = %.2e", worst_sym)};
    });

    criterion(3, "analytic Gaussian Schmidt spectrum", 30.0, [] {
        // correlated_gaussian: exp(-4 ln2 (nu_s+nu_i)^2 / Wp^2) exp(-4 ln2 u^2 / Wu^2), u = (nu_s-nu_i)/sqrt 2
        auto doc = preset_document("correlated_gaussian");
        const double wp = doc["pump"]["fwhm_ghz"].get<double>();
        const double wu = doc["phase_matching"]["fwhm_ghz"].get<double>();
        const double A = 4.0 * kLn2 / (wp * wp);
        const double B = 2.0 * kLn2 / (wu * wu);
        const double mu = std::abs(std::sqrt(A) - std::sqrt(B)) / (std::sqrt(A) + std::sqrt(B));
        const double closed = (1.0 - mu * mu) / (1.0 + mu * mu);

        // Closed form cross-checked by eigendecomposing the Gram matrix on 64^2.
        config::set_path(doc, "grid.points", 64);
        const auto coarse = evaluate_spectrum(parse_scenario(doc)).jsa;
        const ComplexMatrix a = coarse.weighted();
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a * a.adjoint());
        const Eigen::VectorXd ev = es.eigenvalues();
        const double gram = ev.squaredNorm() / (ev.sum() * ev.sum());

        config::set_path(doc, "grid.points", 256);
        const double svd = evaluate_spectrum(parse_scenario(doc)).schmidt.purity;
        const bool ok = std::abs(gram - closed) <= 1e-3 && std::abs(svd - closed) <= 1e-4;
        return Outcome{ok, fmt("closed form %.6f", closed) + fmt(", Gram 64^2 %.6f", gram) + fmt(", SVD 256^2 %.6f", svd)};
    });

    criterion(4, "calibrated purity reproduction", 30.0, [] {
        const auto b = load_preset("paper_fig2b");
        const auto c = load_preset("paper_fig2c");
        const auto& pb = std::get<AngleModel>(b.phase_matching.model());
        const auto& pc = std::get<AngleModel>(c.phase_matching.model());
        const bool shared = pb.theta_deg == pc.theta_deg && pb.fwhm_ghz == pc.fwhm_ghz;
        const double p2b = evaluate_spectrum(b).schmidt.purity;
        const double p2c = evaluate_spectrum(c).schmidt.purity;
        const bool ok = shared && std::abs(p2b - 0.86) <= 0.05 && std::abs(p2c - 0.98) <= 0.05;
        return Outcome{ok, fmt("paper_fig2b %.4f (0.86 +- 0.05)", p2b) + fmt(", paper_fig2c %.4f (0.98 +- 0.05)", p2c) +
                               (shared ? ", shared calibration" : ", calibration NOT shared")};
    });

    criterion(5, "narrow filters recover purity and lengthen the dip", 60.0, [] {
        const auto b = run("fig3b");
        const auto c = run("fig3c");
        const double pb = b.spectrum.schmidt.purity, pc = c.spectrum.schmidt.purity;
        const double wb = b.hom.curve.dip_fwhm_ps, wc = c.hom.curve.dip_fwhm_ps;
        const bool ok = pc > pb && wc >= 2.0 * wb;
        return Outcome{ok, fmt("purity %.4f", pb) + fmt(" -> %.4f", pc) + fmt(", dip FWHM %.1f ps", wb) +
                               fmt(" -> %.1f ps", wc) + fmt(" (x%.2f)", wc / wb)};
    });

    criterion(6, "visibility triple from one calibration", 60.0, [] {
        const auto b = run("fig3b");
        const auto c = run("fig3c");
        const auto d = run("fig3d");
        const double r = calibrate_efficiency_ratio([&](double x) { return visibility_with_ratio(b, x); }, 0.655);
        const double vb = visibility_with_ratio(b, r);
        const double vc = visibility_with_ratio(c, r);
        const double vd = visibility_with_ratio(d, r);
        const bool c_ok = std::abs(vc - 0.785) <= 0.10;
        const bool d_ok = std::abs(vd - 0.795) <= 0.10;
        const bool order = vb < vc && vb < vd;
        std::string detail = fmt("r = %.5g", r) + fmt(", fig3b %.4f", vb) + fmt(", fig3c %.4f (0.785 +- 0.10)", vc) +
                             fmt(", fig3d %.4f (0.795 +- 0.10)", vd);
        if (!c_ok) detail += "; fig3c out of band";
        if (!d_ok) detail += "; fig3d out of band";
        if (!order) detail += "; ordering V(fig3b) < V(fig3c), V(fig3d) violated";
        return Outcome{c_ok && d_ok && order, detail};
    });

    criterion(7, "ideal limit without noise", 1.0, [] {
        const auto e = run("separable");
        const double v = e.hom.curve.visibility;
        const double p = e.hom.budget.heralded_purity;
        return Outcome{std::abs(v - 1.0) <= 1e-6 && std::abs(p - 1.0) <= 1e-6,
                       fmt("visibility %.9f", v) + fmt(", heralded purity %.9f", p)};
    });

    criterion(8, "three-fold rate ratios", 10.0, [] {
        const auto b = run("fig3b");
        const auto c = run("fig3c");
        const auto d = run("fig3d");
        const auto rb = evaluate_rate(b.config, b.hom), rc = evaluate_rate(c.config, c.hom), rd = evaluate_rate(d.config, d.hom);
        const auto bc = relative_threefold_rate(rb, rc);
        const auto db = relative_threefold_rate(rd, rb);
        const bool ok = bc.measurable() && db.measurable() && *bc.ratio >= 1200.0 / 10.0 &&
                        *bc.ratio <= 1200.0 * 10.0 && *db.ratio >= 0.3 && *db.ratio <= 1.5;
        return Outcome{ok, fmt("fig3b:fig3c %.1f (1200 within x10)", bc.ratio.value_or(NAN)) +
                               fmt(", fig3d:fig3b %.3f ([0.3, 1.5])", db.ratio.value_or(NAN))};
    });

    criterion(9, "Poisson JSI ingestion at 1e6 counts", 60.0, [] {
        auto doc = preset_document("paper_fig2b");
        config::set_path(doc, "grid",
                         {{"points", 61}, {"signal_half_span_ghz", 30.0}, {"idler_half_span_ghz", 30.0}});
        const auto model = normalize(evaluate_spectrum(parse_scenario(doc)).filtered.jsa);
        const double truth = purity(model);
        std::vector<double> p;
        double worst = 0.0;
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            std::ostringstream csv;
            write_jsi_csv(csv, synthesize_jsi(model, 1e6, seed));
            const auto g = subtract_background(parse_jsi(csv.str()), BorderMedian{});
            p.push_back(purity(jsi_to_amplitude(g)));
            worst = std::max(worst, std::abs(p.back() - truth));
        }
        const double mean = std::accumulate(p.begin(), p.end(), 0.0) / static_cast<double>(p.size());
        double var = 0.0;
        for (double x : p) var += (x - mean) * (x - mean);
        const double sd = std::sqrt(var / static_cast<double>(p.size() - 1));
        return Outcome{worst <= 0.02 && sd < 0.01,
                       fmt("model %.4f", truth) + fmt(", mean %.4f", mean) + fmt(", max error %.4f", worst) +
                           fmt(", std %.5f over 20 seeds", sd)};
    });

    std::printf("%s: %d criterion(s) failed\n", failures == 0 ? "ACCEPTED" : "NOT ACCEPTED", failures);
    return failures == 0 ? 0 : 1;
}
