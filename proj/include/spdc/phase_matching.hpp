#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <variant>

#include "spdc/errors.hpp"
#include "spdc/grid.hpp"
#include "spdc/profiles.hpp"
#include "spdc/units.hpp"

namespace spdc {

enum class PmfProfile { sinc, gaussian };

/// Phase matching drawn as a ridge in the (nu_s, nu_i) plane: the profile is evaluated on
/// u = nu_s cos(theta) + nu_i sin(theta) and `fwhm_ghz` is its width along u.
struct AngleModel {
    double theta_deg = 45.0;
    double fwhm_ghz = 100.0;
};

/// Phase mismatch from a first/second order expansion around the carriers:
///   dk*L = 2pi*L*(tau_s*nu_s + tau_i*nu_i) + (1/2)(2pi)^2*L*gvd*(nu_s^2 + nu_i^2)
/// with tau the pump/signal (pump/idler) group-delay mismatch in ps/mm and nu in GHz.
struct TaylorModel {
    double length_mm = 10.0;
    double signal_delay_ps_per_mm = 0.3;
    double idler_delay_ps_per_mm = 0.3;
    double gvd_ps2_per_mm = 0.0;
};

class PhaseMatching {
public:
    using Model = std::variant<AngleModel, TaylorModel>;

    PhaseMatching() = default;
    PhaseMatching(Model model, PmfProfile profile,
                  double acceptance_fwhm_ghz = std::numeric_limits<double>::infinity())
        : model_(model), profile_(profile), acceptance_fwhm_ghz_(acceptance_fwhm_ghz) {
        validate();
    }

    const Model& model() const { return model_; }
    PmfProfile profile() const { return profile_; }
    /// Gaussian envelope width along the ridge; infinite means no envelope.
    double acceptance_fwhm_ghz() const { return acceptance_fwhm_ghz_; }
    bool has_finite_acceptance() const { return std::isfinite(acceptance_fwhm_ghz_); }

    void validate() const {
        if (const auto* a = std::get_if<AngleModel>(&model_)) {
            if (!(a->fwhm_ghz > 0.0) || !std::isfinite(a->fwhm_ghz)) {
                throw InvalidParameter("phase-matching width must be positive");
            }
            if (!std::isfinite(a->theta_deg)) throw InvalidParameter("theta must be finite");
        } else {
            const auto& t = std::get<TaylorModel>(model_);
            if (!(t.length_mm > 0.0) || !std::isfinite(t.length_mm)) {
                throw InvalidParameter("crystal length must be positive");
            }
            if (!std::isfinite(t.signal_delay_ps_per_mm) ||
                !std::isfinite(t.idler_delay_ps_per_mm) || !std::isfinite(t.gvd_ps2_per_mm)) {
                throw InvalidParameter("dispersion coefficients must be finite");
            }
        }
        if (!(acceptance_fwhm_ghz_ > 0.0)) {
            throw InvalidParameter("acceptance bandwidth must be positive");
        }
    }

    /// Orientation of the ridge normal (radians): the profile varies along (cos, sin).
    double ridge_angle_rad() const {
        if (const auto* a = std::get_if<AngleModel>(&model_)) return a->theta_deg * kPi / 180.0;
        const auto& t = std::get<TaylorModel>(model_);
        return std::atan2(t.idler_delay_ps_per_mm, t.signal_delay_ps_per_mm);
    }

    /// FWHM of |phi| across the ridge, in GHz along the unit normal. Infinite when flat.
    double ridge_width_ghz() const {
        if (const auto* a = std::get_if<AngleModel>(&model_)) return a->fwhm_ghz;
        const auto& t = std::get<TaylorModel>(model_);
        const double slope = kPi * kGhzTimesPs * t.length_mm *
                             std::hypot(t.signal_delay_ps_per_mm, t.idler_delay_ps_per_mm);
        if (slope == 0.0) return std::numeric_limits<double>::infinity();
        return 2.0 * profile::kSincHalfMax / slope;
    }

    /// Distance across the ridge beyond which |phi|^2 contributes negligibly to integrals.
    double ridge_support_half_width_ghz() const {
        const double w = ridge_width_ghz();
        return profile_ == PmfProfile::sinc ? 64.0 * w : 3.0 * w;
    }

    /// Unnormalized phase-matching amplitude; magnitude 1 where the mismatch vanishes.
    std::complex<double> operator()(double nu_s, double nu_i) const {
        const double th = ridge_angle_rad();
        std::complex<double> value;
        if (const auto* a = std::get_if<AngleModel>(&model_)) {
            const double u = nu_s * std::cos(th) + nu_i * std::sin(th);
            value = profile_ == PmfProfile::sinc ? profile::sinc_fwhm(u, a->fwhm_ghz)
                                                 : profile::gaussian(u, a->fwhm_ghz);
        } else {
            const double half_mismatch = 0.5 * mismatch_times_length(nu_s, nu_i);
            value = mismatch_profile(half_mismatch) * std::polar(1.0, half_mismatch);
        }
        if (has_finite_acceptance()) {
            const double v = -nu_s * std::sin(th) + nu_i * std::cos(th);
            value *= profile::gaussian(v, acceptance_fwhm_ghz_);
        }
        return value;
    }

    /// dk*L for the Taylor model (dimensionless); zero for the angle model.
    double mismatch_times_length(double nu_s, double nu_i) const {
        const auto* t = std::get_if<TaylorModel>(&model_);
        if (t == nullptr) return 0.0;
        const double w = 2.0 * kPi * kGhzTimesPs;
        const double linear = w * (t->signal_delay_ps_per_mm * nu_s + t->idler_delay_ps_per_mm * nu_i);
        const double quadratic = 0.5 * w * w * t->gvd_ps2_per_mm * (nu_s * nu_s + nu_i * nu_i);
        return t->length_mm * (linear + quadratic);
    }

private:
    double mismatch_profile(double half_mismatch) const {
        if (profile_ == PmfProfile::sinc) return profile::sinc(half_mismatch);
        const double r = half_mismatch / profile::kSincHalfMax;
        return std::exp(-kLn2 * r * r);
    }

    Model model_{AngleModel{}};
    PmfProfile profile_ = PmfProfile::sinc;
    double acceptance_fwhm_ghz_ = std::numeric_limits<double>::infinity();
};

/// Samples the phase-matching function on the grid, scaled so the largest magnitude is 1.
inline ComplexMatrix build_pmf(const PhaseMatching& pm, const FrequencyGrid& grid) {
    pm.validate();
    const auto& s = grid.signal();
    const auto& i = grid.idler();
    ComplexMatrix pmf(static_cast<Eigen::Index>(s.size()), static_cast<Eigen::Index>(i.size()));
    for (Eigen::Index r = 0; r < pmf.rows(); ++r) {
        for (Eigen::Index c = 0; c < pmf.cols(); ++c) {
            pmf(r, c) = pm(s[static_cast<std::size_t>(r)], i[static_cast<std::size_t>(c)]);
        }
    }
    const double peak = pmf.cwiseAbs().maxCoeff();
    if (!(peak > 0.0)) throw DegenerateInput("phase-matching function vanishes on the grid");
    pmf /= peak;
    return pmf;
}

}  // namespace spdc
