#pragma once

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "spdc/errors.hpp"
#include "spdc/grid.hpp"
#include "spdc/jsa.hpp"

namespace spdc {

inline constexpr double kDefaultRankCutoff = 1e-7;

/// Schmidt decomposition S(nu_s, nu_i) = sum_n sqrt(lambda_n) phi_s,n(nu_s) phi_i,n(nu_i).
///
/// Mode columns are sampled functions, orthonormal under the grid inner product
/// sum_k conj(f_k) g_k dnu.
struct SchmidtResult {
    std::vector<double> lambdas;  // descending, sum to 1
    ComplexMatrix signal_modes;   // one column per retained mode
    ComplexMatrix idler_modes;
    double purity = 0.0;
    double schmidt_number = 0.0;
    std::size_t rank_kept = 0;
    bool phase_blind = false;
};

namespace detail {

inline void check_decomposable(const JointSpectralAmplitude& jsa) {
    if (!jsa.values().allFinite()) throw InvalidInput("amplitude contains non-finite entries");
    if (!(jsa.norm_squared() > 0.0)) throw DegenerateInput("amplitude is identically zero");
}

inline JointSpectralAmplitude normalized_copy(const JointSpectralAmplitude& jsa) {
    check_decomposable(jsa);
    return jsa.is_normalized() ? jsa : normalize(jsa);
}

}  // namespace detail

/// Singular value decomposition of the area-weighted amplitude. Singular values below
/// `rank_cutoff * sigma_0` are dropped and the remaining lambdas renormalized.
inline SchmidtResult schmidt_decompose(const JointSpectralAmplitude& jsa,
                                       double rank_cutoff = kDefaultRankCutoff) {
    if (!(rank_cutoff >= 0.0) || rank_cutoff >= 1.0) {
        throw InvalidParameter("rank cutoff must lie in [0, 1)");
    }
    const auto normalized = detail::normalized_copy(jsa);
    const ComplexMatrix a = normalized.weighted();
    Eigen::BDCSVD<ComplexMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sigma = svd.singularValues();

    const double sigma0 = sigma.size() > 0 ? sigma(0) : 0.0;
    Eigen::Index kept = 0;
    while (kept < sigma.size() && sigma(kept) > 0.0 && sigma(kept) >= rank_cutoff * sigma0) ++kept;
    if (kept == 0) throw DegenerateInput("amplitude has no nonzero singular values");

    SchmidtResult out;
    out.lambdas.resize(static_cast<std::size_t>(kept));
    double total = 0.0;
    for (Eigen::Index n = 0; n < kept; ++n) total += sigma(n) * sigma(n);
    for (Eigen::Index n = 0; n < kept; ++n) {
        out.lambdas[static_cast<std::size_t>(n)] = sigma(n) * sigma(n) / total;
    }
    const auto& grid = normalized.grid();
    out.signal_modes = svd.matrixU().leftCols(kept) / std::sqrt(grid.signal_step());
    out.idler_modes = svd.matrixV().leftCols(kept).conjugate() / std::sqrt(grid.idler_step());
    out.purity = 0.0;
    for (double l : out.lambdas) out.purity += l * l;
    out.schmidt_number = 1.0 / out.purity;
    out.rank_kept = static_cast<std::size_t>(kept);
    out.phase_blind = jsa.phase_blind();
    return out;
}

/// Tr(rho_s^2) = sum lambda_n^2 with no truncation.
inline double purity(const JointSpectralAmplitude& jsa) {
    return schmidt_decompose(jsa, 0.0).purity;
}

/// Reduced spectral density matrix of one photon, in the area-weighted basis (trace 1).
/// rho_s = A A^dagger, rho_i = A^T A^*.
inline ComplexMatrix reduced_density(const JointSpectralAmplitude& jsa, Arm which) {
    const auto normalized = detail::normalized_copy(jsa);
    const ComplexMatrix a = normalized.weighted();
    if (which == Arm::signal) return a * a.adjoint();
    return a.transpose() * a.conjugate();
}

/// Rebuilds the amplitude from the retained modes.
inline ComplexMatrix reconstruct(const SchmidtResult& r) {
    ComplexMatrix s = ComplexMatrix::Zero(r.signal_modes.rows(), r.idler_modes.rows());
    for (std::size_t n = 0; n < r.rank_kept; ++n) {
        const auto k = static_cast<Eigen::Index>(n);
        s += std::sqrt(r.lambdas[n]) * r.signal_modes.col(k) * r.idler_modes.col(k).transpose();
    }
    return s;
}

/// Mode profiles in long format: arm,mode,nu_GHz,re,im.
inline void write_modes_csv(std::ostream& os, const SchmidtResult& r, const FrequencyGrid& grid,
                            std::size_t max_modes = 10) {
    os << "arm,mode,nu_GHz,re,im\n";
    char line[160];
    const std::size_t n_modes = std::min(max_modes, r.rank_kept);
    for (Arm arm : {Arm::signal, Arm::idler}) {
        const auto& modes = arm == Arm::signal ? r.signal_modes : r.idler_modes;
        const auto& axis = grid.axis(arm);
        for (std::size_t n = 0; n < n_modes; ++n) {
            for (std::size_t k = 0; k < axis.size(); ++k) {
                const auto v = modes(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(n));
                std::snprintf(line, sizeof line, "%s,%zu,%.12g,%.12g,%.12g\n", to_string(arm), n,
                              axis[k], v.real(), v.imag());
                os << line;
            }
        }
    }
}

}  // namespace spdc
