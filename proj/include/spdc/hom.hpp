#pragma once

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "spdc/errors.hpp"
#include "spdc/filter.hpp"
#include "spdc/grid.hpp"
#include "spdc/jsa.hpp"
#include "spdc/schmidt.hpp"

namespace spdc {

/// Spectral state of the photon that reaches the beam splitter, conditioned on a herald click.
struct HeraldedState {
    ComplexMatrix density;                // area-weighted basis, trace 1
    double heralding_transmission = 0.0;  // ||S'||^2 / ||S||^2 of the filtered amplitude
    Arm interfering_arm = Arm::idler;
    std::vector<double> axis;             // detunings of the interfering arm
};

inline Arm partner_of(Arm arm) { return arm == Arm::signal ? Arm::idler : Arm::signal; }

/// Filters both arms and traces out the heralding arm.
inline HeraldedState heralded_state(const JointSpectralAmplitude& jsa,
                                    std::span<const FilterSpec> signal_filters,
                                    std::span<const FilterSpec> idler_filters,
                                    Arm heralding_arm = Arm::signal) {
    const auto filtered = apply_filters(jsa, signal_filters, idler_filters);
    if (!(filtered.jsa.norm_squared() > 0.0)) {
        throw DegenerateInput("filtered amplitude is identically zero");
    }
    const Arm interfering = partner_of(heralding_arm);
    return HeraldedState{reduced_density(filtered.jsa, interfering), filtered.transmission,
                         interfering, jsa.grid().axis(interfering)};
}

/// Weak coherent pulse: a single spectral mode with Poissonian photon number.
struct WcpSource {
    std::vector<double> axis;
    ComplexVector profile;  // area-weighted samples, unit norm
    double mean_photon_number = 0.01;

    /// Laser light with a flat spectrum shaped by `filters`.
    static WcpSource filtered_laser(std::span<const FilterSpec> filters,
                                    const std::vector<double>& axis, double mu) {
        if (!(mu > 0.0)) throw InvalidParameter("mean photon number must be positive");
        validate(filters);
        ComplexVector v(static_cast<Eigen::Index>(axis.size()));
        for (std::size_t k = 0; k < axis.size(); ++k) {
            v(static_cast<Eigen::Index>(k)) = transmission(filters, axis[k]);
        }
        const double n = v.norm();
        if (!(n > 0.0)) throw DegenerateInput("WCP filters block the whole axis");
        return WcpSource{axis, v / n, mu};
    }
};

/// M(tau) = <psi(tau)| rho |psi(tau)> with psi(tau) the WCP mode delayed by `delay_ps`.
inline double mode_overlap(const ComplexMatrix& rho, const WcpSource& wcp, double delay_ps) {
    const auto n = static_cast<Eigen::Index>(wcp.axis.size());
    if (rho.rows() != n || rho.cols() != n || wcp.profile.size() != n) {
        throw ShapeMismatch("density matrix and WCP profile live on different axes");
    }
    ComplexVector shifted(n);
    const double w = 2.0 * kPi * kGhzTimesPs * delay_ps;
    for (Eigen::Index k = 0; k < n; ++k) {
        shifted(k) = wcp.profile(k) * std::polar(1.0, w * wcp.axis[static_cast<std::size_t>(k)]);
    }
    const double m = (shifted.adjoint() * rho * shifted)(0, 0).real();
    return std::clamp(m, 0.0, 1.0);
}

/// Fractions of generated pairs / WCP photons that survive the spectral filters.
struct PhotonBudget {
    double pair_transmission = 1.0;         // both photons pass their filters
    double herald_transmission = 1.0;       // heralding photon passes, partner anywhere
    double interfering_transmission = 1.0;  // interfering photon passes, partner anywhere
    double wcp_transmission = 1.0;          // WCP photon passes the detection filters
    double heralded_purity = 1.0;
};

/// Photon-statistics model for three-fold coincidences (herald + both beam-splitter outputs),
/// kept to second order in the pair probability p and the WCP mean photon number mu.
///
///   heralded photon + WCP photon:  (1/2) p Tp r mu Tw (1 - m M(tau))
///   two WCP photons + herald:      (1/2) p Th (mu Tw)^2 / 2
///   two pairs:                     (1/2) p^2 (1 + P) Tp Td r^2
///   dark count + one photon:       d p (r Tp + Th mu Tw)
///
/// Tp, Th, Td, Tw are PhotonBudget transmissions, P the heralded purity (thermal bunching of
/// the pair number), r the detection-efficiency ratio of the interfering arm to the WCP arm,
/// m the polarization/spatial mode match and d the dark-count probability per gate.
struct NoiseModel {
    enum class Kind { none, accidentals };
    Kind kind = Kind::accidentals;
    double efficiency_ratio = 1.0;
    double dark_count = 0.0;
    double mode_match = 1.0;

    void validate() const {
        if (!(efficiency_ratio > 0.0) || !std::isfinite(efficiency_ratio)) {
            throw InvalidParameter("efficiency ratio must be positive");
        }
        if (!(dark_count >= 0.0) || dark_count >= 1.0) {
            throw InvalidParameter("dark-count probability must lie in [0, 1)");
        }
        if (!(mode_match > 0.0) || mode_match > 1.0) {
            throw InvalidParameter("mode match must lie in (0, 1]");
        }
    }
};

struct CoincidenceTerms {
    double interference = 0.0;  // prefactor of (1 - m M(tau))
    double accidental = 0.0;    // delay independent
};

inline CoincidenceTerms coincidence_terms(const PhotonBudget& b, double mu, double pair_probability,
                                          const NoiseModel& noise) {
    const double p = pair_probability;
    CoincidenceTerms t;
    if (noise.kind == NoiseModel::Kind::none) {
        t.interference = 0.5;
        return t;
    }
    const double r = noise.efficiency_ratio;
    const double tw = b.wcp_transmission;
    t.interference = 0.5 * p * b.pair_transmission * r * mu * tw;
    const double wcp_pairs = 0.5 * p * b.herald_transmission * (mu * tw) * (mu * tw) / 2.0;
    const double double_pairs =
        0.5 * p * p * (1.0 + b.heralded_purity) * b.pair_transmission * b.interfering_transmission * r * r;
    const double dark = noise.dark_count * p * (r * b.pair_transmission + b.herald_transmission * mu * tw);
    t.accidental = wcp_pairs + double_pairs + dark;
    return t;
}

/// Coincidence vs delay with the extracted dip parameters.
struct HomCurve {
    std::vector<double> delays_ps;
    std::vector<double> coincidence;
    double visibility = 0.0;
    double dip_fwhm_ps = 0.0;
    double baseline = 0.0;
    double dip_delay_ps = 0.0;
    double dip_minimum = 0.0;
    bool reliable = true;
    std::vector<std::string> warnings;
};

inline constexpr double kBaselineFwhmMultiple = 5.0;

namespace detail {

// Interpolated half-level crossings on each side of `k_min`; NaN when the curve never crosses.
inline std::pair<double, double> half_level_crossings(const std::vector<double>& x,
                                                      const std::vector<double>& y,
                                                      std::size_t k_min, double level) {
    double left = std::numeric_limits<double>::quiet_NaN();
    double right = left;
    for (std::size_t k = k_min; k > 0; --k) {
        if (y[k - 1] >= level && y[k] < level) {
            left = x[k - 1] + (level - y[k - 1]) * (x[k] - x[k - 1]) / (y[k] - y[k - 1]);
            break;
        }
    }
    for (std::size_t k = k_min; k + 1 < x.size(); ++k) {
        if (y[k + 1] >= level && y[k] < level) {
            right = x[k] + (level - y[k]) * (x[k + 1] - x[k]) / (y[k + 1] - y[k]);
            break;
        }
    }
    return {left, right};
}

}  // namespace detail

/// Evaluates the coincidence curve over `delays_ps` and extracts visibility and dip width.
inline HomCurve hom_curve(const ComplexMatrix& rho, const PhotonBudget& budget, const WcpSource& wcp,
                          double pair_probability, std::span<const double> delays_ps,
                          const NoiseModel& noise) {
    noise.validate();
    if (!(pair_probability > 0.0) || pair_probability > 0.1) {
        throw InvalidParameter("pair probability must lie in (0, 0.1]");
    }
    if (!(wcp.mean_photon_number > 0.0) || wcp.mean_photon_number > 1.0) {
        throw InvalidParameter("WCP mean photon number must lie in (0, 1]");
    }
    if (delays_ps.size() < 3) throw InvalidParameter("need at least three delays");
    if (!std::is_sorted(delays_ps.begin(), delays_ps.end()) ||
        std::adjacent_find(delays_ps.begin(), delays_ps.end()) != delays_ps.end()) {
        throw InvalidParameter("delays must be strictly increasing");
    }

    const auto terms = coincidence_terms(budget, wcp.mean_photon_number, pair_probability, noise);
    const double m = noise.mode_match;
    const auto coincidence = [&](double tau) {
        return terms.interference * (1.0 - m * mode_overlap(rho, wcp, tau)) + terms.accidental;
    };

    HomCurve curve;
    curve.delays_ps.assign(delays_ps.begin(), delays_ps.end());
    curve.coincidence.reserve(delays_ps.size());
    for (double tau : delays_ps) curve.coincidence.push_back(coincidence(tau));

    // Phase ramps repeat every 1/dnu; beyond half of that the curve aliases.
    const double dnu = wcp.axis.size() > 1 ? wcp.axis[1] - wcp.axis[0] : 0.0;
    const double max_delay = std::max(std::abs(delays_ps.front()), std::abs(delays_ps.back()));
    if (dnu > 0.0 && max_delay >= 0.5 / (dnu * kGhzTimesPs)) {
        curve.reliable = false;
        curve.warnings.push_back("delay range exceeds the unambiguous range of the spectral grid");
    }

    const auto& x = curve.delays_ps;
    const auto& y = curve.coincidence;
    const auto k_min = static_cast<std::size_t>(std::min_element(y.begin(), y.end()) - y.begin());
    const double lo = x[k_min == 0 ? 0 : k_min - 1];
    const double hi = x[std::min(k_min + 1, x.size() - 1)];
    const auto [tau0, c0] = boost::math::tools::brent_find_minima(coincidence, lo, hi, 40);
    curve.dip_delay_ps = tau0;
    curve.dip_minimum = std::min(c0, y[k_min]);

    const auto width_for = [&](double baseline) {
        const double level = 0.5 * (baseline + curve.dip_minimum);
        const auto [l, r] = detail::half_level_crossings(x, y, k_min, level);
        return r - l;
    };

    double baseline = *std::max_element(y.begin(), y.end());
    double fwhm = width_for(baseline);
    bool covered = false;
    if (std::isfinite(fwhm) && fwhm > 0.0) {
        double sum = 0.0;
        std::size_t n = 0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            if (std::abs(x[k] - curve.dip_delay_ps) > kBaselineFwhmMultiple * fwhm) {
                sum += y[k];
                ++n;
            }
        }
        if (n > 0) {
            covered = true;
            baseline = sum / static_cast<double>(n);
            const double refined = width_for(baseline);
            if (std::isfinite(refined) && refined > 0.0) fwhm = refined;
        }
    }
    if (!covered) {
        curve.reliable = false;
        curve.warnings.push_back("delay range does not reach 5 dip widths; baseline unreliable");
    }
    curve.baseline = baseline;
    curve.dip_fwhm_ps = std::isfinite(fwhm) ? fwhm : 0.0;
    curve.visibility = baseline > 0.0 ? std::clamp((baseline - curve.dip_minimum) / baseline, 0.0, 1.0) : 0.0;
    return curve;
}

/// Solves visibility(r) = target for the efficiency ratio r on the branch where two-photon WCP
/// events dominate the accidentals (r below the visibility-optimal ratio).
inline double calibrate_efficiency_ratio(const std::function<double(double)>& visibility_of_ratio,
                                         double target, double log10_lo = -6.0,
                                         double log10_hi = 6.0) {
    const auto neg = [&](double lg) { return -visibility_of_ratio(std::pow(10.0, lg)); };
    const auto [best_lg, neg_best] = boost::math::tools::brent_find_minima(neg, log10_lo, log10_hi, 50);
    if (-neg_best < target) {
        throw InvalidParameter("target visibility " + std::to_string(target) +
                               " exceeds the model maximum " + std::to_string(-neg_best));
    }
    const auto f = [&](double lg) { return visibility_of_ratio(std::pow(10.0, lg)) - target; };
    if (f(log10_lo) > 0.0) throw InvalidParameter("target visibility below the search range");
    const auto [a, b] = boost::math::tools::bisect(
        f, log10_lo, best_lg, boost::math::tools::eps_tolerance<double>(50));
    return std::pow(10.0, 0.5 * (a + b));
}

}  // namespace spdc
