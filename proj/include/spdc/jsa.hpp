#pragma once

#include <cmath>
#include <complex>
#include <cstdio>
#include <optional>
#include <ostream>
#include <span>
#include <string>

#include "spdc/errors.hpp"
#include "spdc/filter.hpp"
#include "spdc/grid.hpp"

namespace spdc {

enum class Provenance { model, data };

inline const char* to_string(Provenance p) { return p == Provenance::model ? "model" : "data"; }

/// Complex joint spectral amplitude S(nu_s, nu_i) sampled on a FrequencyGrid.
///
/// Norms include the cell area: ||S||^2 = sum |S_ij|^2 dnu_s dnu_i. `source_norm()` keeps the
/// norm the values had when they were first produced (before any normalization), so filtered
/// and unfiltered amplitudes from the same source remain comparable.
class JointSpectralAmplitude {
public:
    JointSpectralAmplitude(FrequencyGrid grid, ComplexMatrix values, Provenance provenance)
        : grid_(std::move(grid)), values_(std::move(values)), provenance_(provenance) {
        if (values_.rows() != static_cast<Eigen::Index>(grid_.signal_size()) ||
            values_.cols() != static_cast<Eigen::Index>(grid_.idler_size())) {
            throw ShapeMismatch("amplitude matrix is " + std::to_string(values_.rows()) + "x" +
                                std::to_string(values_.cols()) + " but grid is " +
                                std::to_string(grid_.signal_size()) + "x" +
                                std::to_string(grid_.idler_size()));
        }
        if (!values_.allFinite()) throw InvalidInput("amplitude contains non-finite entries");
        source_norm_ = norm();
    }

    const FrequencyGrid& grid() const { return grid_; }
    const ComplexMatrix& values() const { return values_; }
    Provenance provenance() const { return provenance_; }
    /// Intensity-derived amplitudes carry no spectral phase information.
    bool phase_blind() const { return provenance_ == Provenance::data; }

    double norm_squared() const { return values_.squaredNorm() * grid_.cell_area(); }
    double norm() const { return std::sqrt(norm_squared()); }
    double source_norm() const { return source_norm_; }

    bool is_normalized(double tol = 1e-9) const { return std::abs(norm_squared() - 1.0) <= tol; }

    /// Area-weighted matrix A = S sqrt(dnu_s dnu_i); its Frobenius norm equals ||S||.
    ComplexMatrix weighted() const { return values_ * std::sqrt(grid_.cell_area()); }

private:
    friend JointSpectralAmplitude normalize(const JointSpectralAmplitude&);
    friend JointSpectralAmplitude with_values(const JointSpectralAmplitude&, ComplexMatrix);

    FrequencyGrid grid_;
    ComplexMatrix values_;
    Provenance provenance_;
    double source_norm_ = 0.0;
};

/// Copy with unit norm. Throws DegenerateInput for an all-zero amplitude.
inline JointSpectralAmplitude normalize(const JointSpectralAmplitude& jsa) {
    const double n = jsa.norm();
    if (!(n > 0.0)) throw DegenerateInput("cannot normalize an all-zero amplitude");
    JointSpectralAmplitude out = jsa;
    out.values_ /= n;
    return out;
}

/// Copy sharing grid, provenance and source norm but carrying new values.
inline JointSpectralAmplitude with_values(const JointSpectralAmplitude& jsa, ComplexMatrix values) {
    JointSpectralAmplitude out(jsa.grid_, std::move(values), jsa.provenance_);
    out.source_norm_ = jsa.source_norm_;
    return out;
}

/// S = alpha * phi elementwise, normalized.
inline JointSpectralAmplitude build_jsa(const RealMatrix& pef, const ComplexMatrix& pmf,
                                        const FrequencyGrid& grid) {
    const auto rows = static_cast<Eigen::Index>(grid.signal_size());
    const auto cols = static_cast<Eigen::Index>(grid.idler_size());
    if (pef.rows() != rows || pef.cols() != cols || pmf.rows() != rows || pmf.cols() != cols) {
        throw ShapeMismatch("pump envelope and phase matching must be sampled on the same grid");
    }
    ComplexMatrix product = pmf.cwiseProduct(pef.cast<std::complex<double>>());
    if (product.cwiseAbs().maxCoeff() == 0.0) {
        throw DegenerateInput("pump envelope and phase matching do not overlap on the grid");
    }
    return normalize(JointSpectralAmplitude(grid, std::move(product), Provenance::model));
}

struct FilteredJsa {
    JointSpectralAmplitude jsa;  // not renormalized
    double transmission = 1.0;   // ||S'||^2 / ||S||^2
};

/// Multiplies each row by the signal transmission and each column by the idler transmission.
/// An empty chain is an all-pass filter.
inline FilteredJsa apply_filters(const JointSpectralAmplitude& jsa,
                                 std::span<const FilterSpec> signal_filters,
                                 std::span<const FilterSpec> idler_filters,
                                 Diagnostics* diag = nullptr) {
    validate(signal_filters);
    validate(idler_filters);
    const auto& grid = jsa.grid();
    for (const auto& f : signal_filters) {
        if (f.is_bandlimiting() && !grid.contains_signal(f.center_ghz)) {
            warn(diag, "signal filter centered outside the grid span");
        }
    }
    for (const auto& f : idler_filters) {
        if (f.is_bandlimiting() && !grid.contains_idler(f.center_ghz)) {
            warn(diag, "idler filter centered outside the grid span");
        }
    }
    const auto ts = sample(signal_filters, grid.signal());
    const auto ti = sample(idler_filters, grid.idler());
    ComplexMatrix values = jsa.values();
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        for (Eigen::Index c = 0; c < values.cols(); ++c) {
            values(r, c) *= ts[static_cast<std::size_t>(r)] * ti[static_cast<std::size_t>(c)];
        }
    }
    const double before = jsa.norm_squared();
    if (!(before > 0.0)) throw DegenerateInput("cannot filter an all-zero amplitude");
    FilteredJsa out{with_values(jsa, std::move(values)), 0.0};
    out.transmission = out.jsa.norm_squared() / before;
    if (out.transmission < 1e-12) warn(diag, "filters block essentially the whole spectrum");
    return out;
}

inline FilteredJsa apply_filters(const JointSpectralAmplitude& jsa,
                                 const std::optional<FilterSpec>& signal_filter,
                                 const std::optional<FilterSpec>& idler_filter,
                                 Diagnostics* diag = nullptr) {
    FilterChain s, i;
    if (signal_filter) s.push_back(*signal_filter);
    if (idler_filter) i.push_back(*idler_filter);
    return apply_filters(jsa, std::span<const FilterSpec>(s), std::span<const FilterSpec>(i), diag);
}

/// Long-format CSV: nu_s_GHz,nu_i_GHz,re,im with 12 significant digits.
inline void write_jsa_csv(std::ostream& os, const JointSpectralAmplitude& jsa) {
    os << "nu_s_GHz,nu_i_GHz,re,im\n";
    const auto& s = jsa.grid().signal();
    const auto& i = jsa.grid().idler();
    char line[128];
    for (std::size_t r = 0; r < s.size(); ++r) {
        for (std::size_t c = 0; c < i.size(); ++c) {
            const auto v = jsa.values()(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
            std::snprintf(line, sizeof line, "%.12g,%.12g,%.12g,%.12g\n", s[r], i[c], v.real(),
                          v.imag());
            os << line;
        }
    }
}

}  // namespace spdc
