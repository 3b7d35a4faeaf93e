#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spdc {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s, exact
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kLn2 = std::numbers::ln2;

// Frequencies are carried in GHz and delays in ps throughout; 1 GHz * 1 ps = 1e-3.
inline constexpr double kGhzTimesPs = 1e-3;

inline double wavelength_nm_to_ghz(double wavelength_nm) {
    return kSpeedOfLight / (wavelength_nm * 1e-9) * 1e-9;
}

inline double frequency_ghz_to_nm(double frequency_ghz) {
    return kSpeedOfLight / (frequency_ghz * 1e9) * 1e9;
}

/// Converts a (small) wavelength interval around `center_nm` into a frequency interval.
inline double bandwidth_nm_to_ghz(double width_nm, double center_nm) {
    const double center_m = center_nm * 1e-9;
    return kSpeedOfLight * width_nm * 1e-9 / (center_m * center_m) * 1e-9;
}

inline double bandwidth_ghz_to_nm(double width_ghz, double center_nm) {
    const double center_m = center_nm * 1e-9;
    return width_ghz * 1e9 * center_m * center_m / kSpeedOfLight * 1e9;
}

enum class BandwidthUnit { ghz, nm };

/// A spectral width given either in frequency or in wavelength units.
struct Bandwidth {
    double value = 0.0;
    BandwidthUnit unit = BandwidthUnit::ghz;

    static Bandwidth ghz(double v) { return {v, BandwidthUnit::ghz}; }
    static Bandwidth nm(double v) { return {v, BandwidthUnit::nm}; }

    double in_ghz(double center_nm) const {
        return unit == BandwidthUnit::ghz ? value : bandwidth_nm_to_ghz(value, center_nm);
    }
};

}  // namespace spdc
