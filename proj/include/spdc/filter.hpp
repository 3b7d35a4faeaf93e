#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "spdc/errors.hpp"
#include "spdc/grid.hpp"
#include "spdc/units.hpp"

namespace spdc {

enum class FilterShape { flat, gaussian, lorentzian, supergaussian };

/// Spectral filter acting on one arm.
///
/// `fwhm_ghz` is the full width at half maximum of the power transmission |t|^2, the way filter
/// bandwidths are quoted. `peak` is the amplitude transmission at the center, so a filter with
/// peak 0.5 passes a quarter of the power.
struct FilterSpec {
    FilterShape shape = FilterShape::gaussian;
    double center_ghz = 0.0;  // detuning from the arm's carrier
    double fwhm_ghz = 20.0;
    int order = 2;  // super-Gaussian order, >= 2
    double peak = 1.0;

    static FilterSpec flat(double peak = 1.0) { return {FilterShape::flat, 0.0, 1.0, 2, peak}; }
    static FilterSpec gaussian(double fwhm, double center = 0.0, double peak = 1.0) {
        return {FilterShape::gaussian, center, fwhm, 2, peak};
    }
    static FilterSpec lorentzian(double fwhm, double center = 0.0, double peak = 1.0) {
        return {FilterShape::lorentzian, center, fwhm, 2, peak};
    }
    static FilterSpec supergaussian(double fwhm, int order, double center = 0.0, double peak = 1.0) {
        return {FilterShape::supergaussian, center, fwhm, order, peak};
    }

    /// Detuning of a filter centered at `wavelength_nm` on an arm whose carrier is `carrier_nm`.
    static double detuning_of(double wavelength_nm, double carrier_nm) {
        return wavelength_nm_to_ghz(wavelength_nm) - wavelength_nm_to_ghz(carrier_nm);
    }

    void validate() const {
        if (!(peak > 0.0) || peak > 1.0) {
            throw InvalidParameter("filter peak transmission must lie in (0, 1]");
        }
        if (!std::isfinite(center_ghz)) throw InvalidParameter("filter center must be finite");
        if (shape != FilterShape::flat && (!(fwhm_ghz > 0.0) || !std::isfinite(fwhm_ghz))) {
            throw InvalidParameter("filter fwhm must be positive");
        }
        if (shape == FilterShape::supergaussian && order < 2) {
            throw InvalidParameter("super-Gaussian order must be at least 2");
        }
    }

    /// Amplitude transmission at detuning `nu` (GHz).
    double operator()(double nu) const {
        const double x = 2.0 * (nu - center_ghz) / fwhm_ghz;
        switch (shape) {
            case FilterShape::flat:
                return peak;
            case FilterShape::gaussian:
                return peak * std::exp(-0.5 * kLn2 * x * x);
            case FilterShape::lorentzian:
                return peak / std::sqrt(1.0 + x * x);
            case FilterShape::supergaussian:
                return peak * std::exp(-0.5 * kLn2 * std::pow(x * x, order));
        }
        return 0.0;
    }

    bool is_bandlimiting() const { return shape != FilterShape::flat; }
};

/// Filters traversed in sequence by one photon; transmission multiplies.
using FilterChain = std::vector<FilterSpec>;

inline double transmission(std::span<const FilterSpec> chain, double nu) {
    double t = 1.0;
    for (const auto& f : chain) t *= f(nu);
    return t;
}

/// Narrowest band-limiting width in the chain; 0 when nothing limits the band.
inline double narrowest_fwhm_ghz(std::span<const FilterSpec> chain) {
    double w = 0.0;
    for (const auto& f : chain) {
        if (f.is_bandlimiting() && (w == 0.0 || f.fwhm_ghz < w)) w = f.fwhm_ghz;
    }
    return w;
}

inline std::vector<double> sample(std::span<const FilterSpec> chain, const std::vector<double>& axis) {
    std::vector<double> t(axis.size());
    for (std::size_t k = 0; k < axis.size(); ++k) t[k] = transmission(chain, axis[k]);
    return t;
}

inline void validate(std::span<const FilterSpec> chain) {
    for (const auto& f : chain) f.validate();
}

}  // namespace spdc
