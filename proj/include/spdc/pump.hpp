#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "spdc/errors.hpp"
#include "spdc/grid.hpp"
#include "spdc/profiles.hpp"
#include "spdc/units.hpp"

namespace spdc {

enum class PulseShape { gaussian, sech2 };

/// Spectral amplitude of the pump, expressed on the signal+idler detuning sum.
///
/// `fwhm` is the full width at half maximum of the amplitude itself. `offset_ghz` is the pump
/// carrier's offset from the energy-matched point of the grid (0 when the grid centers are
/// chosen by energy conservation).
struct PumpEnvelope {
    double center_nm = 775.55;
    Bandwidth fwhm = Bandwidth::ghz(100.0);
    PulseShape shape = PulseShape::gaussian;
    double offset_ghz = 0.0;

    double fwhm_ghz() const { return fwhm.in_ghz(center_nm); }

    void validate() const {
        if (!(center_nm > 0.0)) throw InvalidParameter("pump center wavelength must be positive");
        if (!(fwhm.value > 0.0) || !std::isfinite(fwhm.value)) {
            throw InvalidParameter("pump fwhm must be positive");
        }
        if (!std::isfinite(offset_ghz)) throw InvalidParameter("pump offset must be finite");
    }

    /// Amplitude at detuning sum nu_s + nu_i (GHz); 1 at the carrier.
    double operator()(double detuning_sum_ghz) const {
        const double x = detuning_sum_ghz - offset_ghz;
        const double w = fwhm_ghz();
        return shape == PulseShape::gaussian ? profile::gaussian(x, w) : profile::sech2(x, w);
    }

    /// Half-width of the interval outside which the amplitude is negligible (< 1e-10).
    double support_half_width_ghz() const {
        const double w = fwhm_ghz();
        return shape == PulseShape::gaussian ? 3.0 * w : 7.0 * w;
    }
};

/// Pump derived from a band-pass filter on the fundamental followed by frequency doubling.
///
/// The doubled pulse is modeled as a Gaussian whose bandwidth is `shg_multiplier` times the
/// fundamental filter width (sqrt(2) for a Gaussian field squared in time).
inline PumpEnvelope shg_pump_from_fundamental(double fundamental_filter_nm,
                                              double fundamental_center_nm,
                                              double shg_multiplier = std::numbers::sqrt2) {
    if (!(fundamental_filter_nm > 0.0)) {
        throw InvalidParameter("fundamental filter width must be positive");
    }
    if (!(shg_multiplier > 0.0)) throw InvalidParameter("shg multiplier must be positive");
    PumpEnvelope pump;
    pump.center_nm = fundamental_center_nm / 2.0;
    pump.fwhm = Bandwidth::ghz(shg_multiplier *
                               bandwidth_nm_to_ghz(fundamental_filter_nm, fundamental_center_nm));
    pump.shape = PulseShape::gaussian;
    return pump;
}

inline constexpr double kEnergyMismatchWarnGhz = 100.0;

/// Pump carrier minus the sum of the grid's signal and idler carriers, in GHz.
inline double energy_mismatch_ghz(const PumpEnvelope& pump, const FrequencyGrid& grid) {
    return wavelength_nm_to_ghz(pump.center_nm) - grid.signal_center_ghz() -
           grid.idler_center_ghz();
}

/// Samples the pump envelope on the grid: alpha_ij = shape(nu_s_i + nu_i_j - offset).
inline RealMatrix build_pef(const PumpEnvelope& pump, const FrequencyGrid& grid,
                            Diagnostics* diag = nullptr) {
    pump.validate();
    const double mismatch = energy_mismatch_ghz(pump, grid);
    if (std::abs(mismatch) > kEnergyMismatchWarnGhz) {
        warn(diag, "pump carrier misses the grid's energy-matched point by " +
                       std::to_string(mismatch) + " GHz");
    }
    const auto& s = grid.signal();
    const auto& i = grid.idler();
    RealMatrix pef(static_cast<Eigen::Index>(s.size()), static_cast<Eigen::Index>(i.size()));
    for (Eigen::Index r = 0; r < pef.rows(); ++r) {
        for (Eigen::Index c = 0; c < pef.cols(); ++c) {
            pef(r, c) = pump(s[static_cast<std::size_t>(r)] + i[static_cast<std::size_t>(c)]);
        }
    }
    return pef;
}

}  // namespace spdc
