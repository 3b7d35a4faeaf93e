#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "spdc/errors.hpp"
#include "spdc/units.hpp"

namespace spdc {

using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

enum class Arm { signal, idler };

inline const char* to_string(Arm arm) { return arm == Arm::signal ? "signal" : "idler"; }

inline constexpr std::size_t kMinGridPoints = 2;
inline constexpr double kUniformSpacingTolerance = 1e-9;

/// Signal/idler detuning axes (GHz) around two carrier wavelengths.
///
/// Every 2-D spectral function in the library is sampled on one of these; row index is the
/// signal bin, column index the idler bin.
class FrequencyGrid {
public:
    FrequencyGrid(double signal_center_nm, double idler_center_nm,
                  std::vector<double> signal_detunings, std::vector<double> idler_detunings)
        : signal_center_nm_(signal_center_nm),
          idler_center_nm_(idler_center_nm),
          signal_(std::move(signal_detunings)),
          idler_(std::move(idler_detunings)) {
        if (!(signal_center_nm_ > 0.0) || !(idler_center_nm_ > 0.0)) {
            throw InvalidParameter("grid center wavelengths must be positive");
        }
        signal_step_ = check_axis(signal_, "signal");
        idler_step_ = check_axis(idler_, "idler");
    }

    /// Symmetric uniform axes of `signal_points` x `idler_points` samples spanning +-half_span.
    static FrequencyGrid symmetric(double signal_center_nm, double idler_center_nm,
                                   double signal_half_span_ghz, double idler_half_span_ghz,
                                   std::size_t signal_points, std::size_t idler_points) {
        return FrequencyGrid(signal_center_nm, idler_center_nm,
                             linspace(signal_half_span_ghz, signal_points),
                             linspace(idler_half_span_ghz, idler_points));
    }

    double signal_center_nm() const { return signal_center_nm_; }
    double idler_center_nm() const { return idler_center_nm_; }
    double signal_center_ghz() const { return wavelength_nm_to_ghz(signal_center_nm_); }
    double idler_center_ghz() const { return wavelength_nm_to_ghz(idler_center_nm_); }

    const std::vector<double>& signal() const { return signal_; }
    const std::vector<double>& idler() const { return idler_; }
    const std::vector<double>& axis(Arm arm) const { return arm == Arm::signal ? signal_ : idler_; }

    std::size_t signal_size() const { return signal_.size(); }
    std::size_t idler_size() const { return idler_.size(); }
    double signal_step() const { return signal_step_; }
    double idler_step() const { return idler_step_; }
    double step(Arm arm) const { return arm == Arm::signal ? signal_step_ : idler_step_; }
    double cell_area() const { return signal_step_ * idler_step_; }

    bool contains_signal(double nu) const { return nu >= signal_.front() && nu <= signal_.back(); }
    bool contains_idler(double nu) const { return nu >= idler_.front() && nu <= idler_.back(); }

    bool same_as(const FrequencyGrid& other) const {
        return signal_center_nm_ == other.signal_center_nm_ &&
               idler_center_nm_ == other.idler_center_nm_ && signal_ == other.signal_ &&
               idler_ == other.idler_;
    }

private:
    static std::vector<double> linspace(double half_span, std::size_t n) {
        if (!(half_span > 0.0)) throw InvalidParameter("grid half-span must be positive");
        if (n < kMinGridPoints) {
            throw InvalidParameter("grid needs at least " + std::to_string(kMinGridPoints) +
                                   " points per axis");
        }
        std::vector<double> out(n);
        const double step = 2.0 * half_span / static_cast<double>(n - 1);
        for (std::size_t k = 0; k < n; ++k) out[k] = -half_span + step * static_cast<double>(k);
        return out;
    }

    static double check_axis(const std::vector<double>& axis, const char* name) {
        if (axis.size() < kMinGridPoints) {
            throw InvalidParameter(std::string(name) + " axis has " +
                                   std::to_string(axis.size()) + " points, need at least " +
                                   std::to_string(kMinGridPoints));
        }
        for (double v : axis) {
            if (!std::isfinite(v)) throw InvalidInput(std::string(name) + " axis is not finite");
        }
        const double step = (axis.back() - axis.front()) / static_cast<double>(axis.size() - 1);
        if (!(step > 0.0)) {
            throw InvalidInput(std::string(name) + " axis must be strictly increasing");
        }
        for (std::size_t k = 1; k < axis.size(); ++k) {
            const double d = axis[k] - axis[k - 1];
            if (!(d > 0.0)) {
                throw InvalidInput(std::string(name) + " axis must be strictly increasing");
            }
            if (std::abs(d - step) > kUniformSpacingTolerance * step) {
                throw InvalidInput(std::string(name) + " axis is not uniformly spaced near " +
                                   std::to_string(axis[k]) + " GHz");
            }
        }
        return step;
    }

    double signal_center_nm_;
    double idler_center_nm_;
    std::vector<double> signal_;
    std::vector<double> idler_;
    double signal_step_ = 0.0;
    double idler_step_ = 0.0;
};

}  // namespace spdc
