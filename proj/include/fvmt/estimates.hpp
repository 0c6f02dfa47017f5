#pragma once

#include "fvmt/coefficients.hpp"
#include "fvmt/grid.hpp"
#include "fvmt/report.hpp"
#include "fvmt/weak_residual_types.hpp"

#include <vector>

namespace fvmt {

// Energy inequality at t' = T:
//   int hhat(z(T)) + 1/2 intint |vtilde|^2
//     <= (C_b^2/2) intint |rho(t, x - dx)|^2 + int hhat(z(0)).
// Time integrals by trapezoid on the stored frames; the slack carries a
// first-order allowance for the time discretization.
EstimateReport energy_budget(const SpaceTimeField& traj, const SpaceTimeField& rho_cells,
                             const CoefficientSet& coeffs);

// Explicit candidate constant bounding the four energy quantities below,
// computed from (coeffs, v0, |p|_{L2L2}) only -- independent of the
// trajectory, n, and delta.
double c15_candidate(const CoefficientSet& coeffs, const GridFunction& initial,
                     double pressure_l2);

// The four bounded quantities (sup_t |v|^2, sup_t |z|^2, intint |vtilde|^2,
// intint |ztilde|^2), each reported against the C15 candidate.
std::vector<EstimateReport> uniform_bounds(const SpaceTimeField& traj,
                                           const CoefficientSet& coeffs, double pressure_l2);

// Dual-norm bound: |<dz/dt, eta>| <= C17 |eta|_{L2(0,T;X)} with
// C17 = C15 + |p|_{L2(0,T;H)}. The pairing is evaluated through the scheme's
// summation-by-parts identity (fluxes against backward differences of eta's
// cell averages). Returns the worst report over the family.
EstimateReport dual_norm_bound(const SpaceTimeField& traj, const SpaceTimeField& rho_cells,
                               const CoefficientSet& coeffs,
                               const std::vector<TestFunction>& eta_family,
                               double pressure_l2);

// Direct cross-check of the same pairing by time-differencing
// sum dx h(v_i) etabar_i; used by tests as an independent oracle route.
double dual_pairing_by_time_difference(const SpaceTimeField& traj,
                                       const CoefficientSet& coeffs, const TestFunction& eta);

// The flux-sum pairing for a single test function (exposed for tests).
double dual_pairing_flux_form(const SpaceTimeField& traj, const SpaceTimeField& rho_cells,
                              const CoefficientSet& coeffs, const TestFunction& eta);

// Continuous piecewise-linear function on uniform knots over [0, 1]; its
// Linf, L2 and derivative-L2 norms are exactly computable.
struct PiecewiseLinear {
    std::vector<double> knot_values; // m+1 values at x_j = j/m

    double linf() const;
    double l2() const;
    double deriv_l2() const;
};

PiecewiseLinear interpolate_cell_centers(const GridFunction& gf);

// |u|_Linf^2 <= |u|_H^2 + 2 |u|_H |u'|_H, evaluated exactly.
EstimateReport gn_inequality_check(const PiecewiseLinear& u);

} // namespace fvmt
