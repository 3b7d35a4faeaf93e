#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <vector>

#include "spdc/errors.hpp"
#include "spdc/filter.hpp"
#include "spdc/grid.hpp"
#include "spdc/jsa.hpp"
#include "spdc/phase_matching.hpp"
#include "spdc/pump.hpp"

namespace spdc {

/// The unnormalized two-photon amplitude alpha(nu_s + nu_i) * phi(nu_s, nu_i) as a function
/// over the whole plane.
///
/// Pair-number bookkeeping needs integrals of |S|^2 beyond any analysis grid: the total
/// emission (every generated pair) and the marginal reaching one filtered arm while the partner
/// goes anywhere. Those integrals are done here by quadrature along the pump band, which is the
/// only factor guaranteed to have compact support.
class SpdcSource {
public:
    SpdcSource(PumpEnvelope pump, PhaseMatching pm) : pump_(pump), pm_(std::move(pm)) {
        pump_.validate();
        pm_.validate();
    }

    const PumpEnvelope& pump() const { return pump_; }
    const PhaseMatching& phase_matching() const { return pm_; }

    std::complex<double> operator()(double nu_s, double nu_i) const {
        return pump_(nu_s + nu_i) * pm_(nu_s, nu_i);
    }

    double intensity(double nu_s, double nu_i) const { return std::norm((*this)(nu_s, nu_i)); }

    /// Model amplitude on a grid, built from the sampled pump envelope and phase matching.
    JointSpectralAmplitude jsa(const FrequencyGrid& grid, Diagnostics* diag = nullptr) const {
        return build_jsa(build_pef(pump_, grid, diag), build_pmf(pm_, grid), grid);
    }

    /// Integral of |S|^2 over the whole plane.
    ///
    /// Requires a bounded emission region: either a finite acceptance bandwidth or a ridge that
    /// is not parallel to the pump band.
    double total_emission() const {
        // Coordinates: s = nu_s + nu_i (pump band), t = nu_s. Jacobian is 1.
        const double th = pm_.ridge_angle_rad();
        const double c = std::cos(th), sn = std::sin(th);
        // u = t (c - sn) + s sn, v = s c - t (sn + c)
        const double ridge_coeff = c - sn;
        const double accept_coeff = sn + c;
        const double wr = pm_.ridge_width_ghz();
        const double wa = pm_.acceptance_fwhm_ghz();

        double t_extent = std::numeric_limits<double>::infinity();
        double t_scale = std::numeric_limits<double>::infinity();
        bool t_from_ridge = false;
        if (std::abs(ridge_coeff) > 1e-12 && std::isfinite(wr)) {
            t_extent = pm_.ridge_support_half_width_ghz() / std::abs(ridge_coeff);
            t_scale = wr / std::abs(ridge_coeff);
            t_from_ridge = true;
        }
        if (std::abs(accept_coeff) > 1e-12 && std::isfinite(wa)) {
            const double extent = 3.0 * wa / std::abs(accept_coeff);
            t_scale = std::min(t_scale, wa / std::abs(accept_coeff));
            if (extent < t_extent) {
                t_extent = extent;
                t_from_ridge = false;
            }
        }
        t_scale = std::min(t_scale, quadratic_phase_scale());
        if (!std::isfinite(t_extent)) {
            throw InvalidParameter(
                "total emission diverges: give the phase matching a finite acceptance bandwidth");
        }
        const double s_half = pump_.support_half_width_ghz();
        double s_scale = pump_.fwhm_ghz();
        if (std::abs(sn) > 1e-12 && std::isfinite(wr)) s_scale = std::min(s_scale, wr / std::abs(sn));
        if (std::abs(c) > 1e-12 && std::isfinite(wa)) s_scale = std::min(s_scale, wa / std::abs(c));

        const auto s_nodes = nodes(pump_.offset_ghz - s_half, pump_.offset_ghz + s_half, s_scale);
        double total = 0.0;
        for (double s : s_nodes.points) {
            // Center of the t-window for this s follows the limiting factor's ridge line.
            const double t0 = t_from_ridge ? -s * sn / ridge_coeff : s * c / accept_coeff;
            const auto t_nodes = nodes(t0 - t_extent, t0 + t_extent, t_scale);
            double line = 0.0;
            for (double t : t_nodes.points) line += intensity(t, s - t);
            total += line * t_nodes.step;
        }
        return total * s_nodes.step;
    }

    /// Integral of |t(nu)|^2 |S|^2 over the plane where t filters `arm` (sampled on the grid
    /// axis for that arm) and the partner photon is unrestricted.
    double arm_emission(std::span<const FilterSpec> filters, Arm arm, const FrequencyGrid& grid) const {
        const auto& axis = grid.axis(arm);
        const double d_axis = grid.step(arm);
        const auto t = sample(filters, axis);
        const double s_half = pump_.support_half_width_ghz();
        const double scale = partner_scale(arm);
        double total = 0.0;
        for (std::size_t k = 0; k < axis.size(); ++k) {
            const double w = t[k] * t[k];
            if (w == 0.0) continue;
            const double nu = axis[k];
            // The pump confines the partner to offset - nu +- s_half.
            const double center = pump_.offset_ghz - nu;
            const auto partner = nodes(center - s_half, center + s_half, scale);
            double line = 0.0;
            for (double q : partner.points) {
                line += arm == Arm::signal ? intensity(nu, q) : intensity(q, nu);
            }
            total += w * line * partner.step;
        }
        return total * d_axis;
    }

    /// Integral of |t_s t_i S|^2 over the grid.
    double pair_emission(std::span<const FilterSpec> signal_filters,
                         std::span<const FilterSpec> idler_filters, const FrequencyGrid& grid) const {
        const auto ts = sample(signal_filters, grid.signal());
        const auto ti = sample(idler_filters, grid.idler());
        double total = 0.0;
        for (std::size_t r = 0; r < ts.size(); ++r) {
            if (ts[r] == 0.0) continue;
            double row = 0.0;
            for (std::size_t c = 0; c < ti.size(); ++c) {
                row += ti[c] * ti[c] * intensity(grid.signal()[r], grid.idler()[c]);
            }
            total += ts[r] * ts[r] * row;
        }
        return total * grid.cell_area();
    }

private:
    struct Nodes {
        std::vector<double> points;
        double step;
    };

    static constexpr double kSamplesPerScale = 24.0;
    static constexpr std::size_t kMaxNodes = 200'000;

    static Nodes nodes(double lo, double hi, double scale) {
        const double span = hi - lo;
        auto n = static_cast<std::size_t>(std::ceil(span / scale * kSamplesPerScale));
        n = std::clamp<std::size_t>(n, 64, kMaxNodes);
        Nodes out{std::vector<double>(n), span / static_cast<double>(n)};
        // midpoint rule
        for (std::size_t k = 0; k < n; ++k) out.points[k] = lo + (static_cast<double>(k) + 0.5) * out.step;
        return out;
    }

    // Finest feature of |S|^2 along the partner axis when the other frequency is held fixed.
    double partner_scale(Arm fixed) const {
        const double th = pm_.ridge_angle_rad();
        // Along the partner axis, u changes at rate sin (partner = idler) or cos (partner = signal).
        const double du = fixed == Arm::signal ? std::sin(th) : std::cos(th);
        const double dv = fixed == Arm::signal ? std::cos(th) : std::sin(th);
        double scale = pump_.fwhm_ghz();
        const double wr = pm_.ridge_width_ghz();
        const double wa = pm_.acceptance_fwhm_ghz();
        if (std::abs(du) > 1e-12 && std::isfinite(wr)) scale = std::min(scale, wr / std::abs(du));
        if (std::abs(dv) > 1e-12 && std::isfinite(wa)) scale = std::min(scale, wa / std::abs(dv));
        return std::min(scale, quadratic_phase_scale());
    }

    // With a quadratic mismatch term, keep dk*L/2 changing by < ~1 per scale over the pump band.
    double quadratic_phase_scale() const {
        const auto* t = std::get_if<TaylorModel>(&pm_.model());
        if (t == nullptr || t->gvd_ps2_per_mm == 0.0) return std::numeric_limits<double>::infinity();
        const double w = 2.0 * kPi * kGhzTimesPs;
        const double nu_max = pump_.support_half_width_ghz() + 1.0;
        return 1.0 / (0.5 * t->length_mm * w * w * std::abs(t->gvd_ps2_per_mm) * nu_max);
    }

    PumpEnvelope pump_;
    PhaseMatching pm_;
};

}  // namespace spdc
