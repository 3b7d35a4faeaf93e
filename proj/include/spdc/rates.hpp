#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "spdc/errors.hpp"
#include "spdc/hom.hpp"

namespace spdc {

/// Transmission bookkeeping for one configuration's three-fold coincidence rate.
///
/// The rate is proportional to herald * heralding * wcp: the heralding photon passes its
/// filters, its partner then passes the interfering-arm filters, and a WCP photon passes the
/// detection filters. `idler` is the interfering arm's marginal and is reported for reference.
struct RateEstimate {
    std::string id;
    double signal = 1.0;
    double heralding = 1.0;
    double idler = 1.0;
    double wcp = 1.0;
    double pair_probability = 0.01;
    double mean_photon_number = 0.01;

    double factor() const { return signal * heralding * wcp; }
};

inline RateEstimate rate_estimate(std::string id, const PhotonBudget& b, double pair_probability,
                                  double mean_photon_number) {
    RateEstimate r;
    r.id = std::move(id);
    r.signal = b.herald_transmission;
    r.heralding = b.herald_transmission > 0.0 ? b.pair_transmission / b.herald_transmission : 0.0;
    r.idler = b.interfering_transmission;
    r.wcp = b.wcp_transmission;
    r.pair_probability = pair_probability;
    r.mean_photon_number = mean_photon_number;
    return r;
}

struct RateRatio {
    RateEstimate numerator;
    RateEstimate denominator;
    std::optional<double> ratio;  // empty when either configuration has zero transmission
    std::string note;

    bool measurable() const { return ratio.has_value(); }
};

/// Three-fold rate of `a` relative to `b`.
inline RateRatio relative_threefold_rate(const RateEstimate& a, const RateEstimate& b) {
    if (a.pair_probability != b.pair_probability || a.mean_photon_number != b.mean_photon_number) {
        throw InvalidParameter("rate comparison needs equal pair probability and mean photon number");
    }
    RateRatio out{a, b, std::nullopt, {}};
    const double fa = a.factor();
    const double fb = b.factor();
    if (!(fa > 0.0) || !(fb > 0.0) || !std::isfinite(fa) || !std::isfinite(fb)) {
        out.note = "unmeasurable: zero transmission in " + (fa > 0.0 ? b.id : a.id);
        return out;
    }
    out.ratio = fa / fb;
    return out;
}

}  // namespace spdc
