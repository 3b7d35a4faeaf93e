#pragma once

#include <cmath>

#include "spdc/units.hpp"

// Peak-normalized line shapes parameterized by their full width at half maximum.
// Each returns the value of the profile itself (not its square) at offset `x`.
namespace spdc::profile {

// sinc(x) = 1/2 at x = kSincHalfMax
inline constexpr double kSincHalfMax = 1.895494267033981;
// sech^2(x) = 1/2 at x = acosh(sqrt(2))
inline const double kSech2HalfMax = std::acosh(std::sqrt(2.0));

inline double sinc(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

inline double gaussian(double x, double fwhm) {
    const double r = x / fwhm;
    return std::exp(-4.0 * kLn2 * r * r);
}

inline double sech2(double x, double fwhm) {
    const double y = 2.0 * kSech2HalfMax * x / fwhm;
    if (std::abs(y) > 350.0) return 0.0;
    const double c = std::cosh(y);
    return 1.0 / (c * c);
}

inline double sinc_fwhm(double x, double fwhm) { return sinc(2.0 * kSincHalfMax * x / fwhm); }

}  // namespace spdc::profile
