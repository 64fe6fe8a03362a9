#pragma once

#include "startrace/gaussfn.hpp"
#include "startrace/star.hpp"

#include <vector>

namespace startrace {

/// tau(u) = nu^prefactor * integral of u rho over R^{2n}.
///
/// Lebesgue measure equals Omega^n / n! for Omega = sum dq_i ^ dp_i, so the 1/n! of the
/// volume normalisation is already inside the integral.
class TraceFunctional {
public:
    TraceFunctional(PhaseSpace space, PolySeries density, int prefactor);

    /// rho = 1, prefactor -n.
    static TraceFunctional moyal(PhaseSpace space, int order);

    const PhaseSpace& space() const { return space_; }
    const PolySeries& density() const { return density_; }
    int prefactor() const { return prefactor_; }
    int order() const { return density_.order(); }
    bool is_standard() const;

    ValueSeries evaluate(const GaussSeries& u) const;
    ValueSeries evaluate(const GaussFn& u) const { return evaluate(GaussSeries::constant(u, order())); }

    /// Coefficient tau_s(w) = integral of w rho_s.
    IntegralValue component(int s, const GaussFn& w) const;

    friend bool operator==(const TraceFunctional& a, const TraceFunctional& b) = default;

private:
    PhaseSpace space_;
    PolySeries density_;
    int prefactor_;
};

/// tau(u * v) - tau(v * u).
ValueSeries trace_residual(const TraceFunctional& t, const StarProduct& s, const GaussFn& u, const GaussFn& v);

/// sum_{j=0..k} tau_{k-j}(C_{j+1}^-(u, v)); the nu^(prefactor + k + 1) coefficient of trace_residual.
IntegralValue trk_residual(const TraceFunctional& t, const StarProduct& s, int k, const GaussFn& u, const GaussFn& v);

/// Divides by the leading density constant a and by nu^(prefactor + m + n), m the density valuation.
TraceFunctional standardize(const TraceFunctional& t);

/// c(nu) with t2 = c t1, solved order by order on the first probe whose leading value is
/// invertible and checked on every probe. Throws InconsistentRatio when a probe disagrees.
RationalSeries proportionality_factor(const TraceFunctional& t1, const TraceFunctional& t2,
                                      const std::vector<GaussFn>& probes);

/// tau(D u) - nu d/dnu tau(u).
ValueSeries normalization_residual(const TraceFunctional& t, const EulerDerivation& d, const GaussSeries& u);

/// Eight integrable probes: isotropic Gaussians of several widths and centres with
/// polynomial factors. Every probe has a single-term integral.
std::vector<GaussFn> default_probes(PhaseSpace space);

}  // namespace startrace
