#pragma once

#include "fvmt/coefficients.hpp"
#include "fvmt/field.hpp"
#include "fvmt/grid.hpp"
#include "fvmt/report.hpp"

#include <vector>

namespace fvmt {

// Coefficients of the regularized dual problem
//   dt zeta - sigma_eps dxx zeta - phi_eps dx zeta = xi,
// with homogeneous Neumann boundaries and zero initial data.
struct DualCoefficients {
    PressureField sigma_eps;
    PressureField phi_eps;
    PressureField xi;
    double horizon = 0.0;
    double delta_sigma = 0.0; // lower bound of sigma_eps
    double c_sigma = 0.0;     // upper bound of sigma_eps
    double c_q = 0.0;         // bound for the difference-quotient field q
    double xi_sup = 0.0;
    double phi_sup = 0.0;      // |phi_eps|_Linf
    double sigma_dx_sup = 0.0; // |dx sigma_eps|_Linf (may grow as eps shrinks)
    double sigma_dt_sup = 0.0; // |dt sigma_eps|_Linf

    // Compact-support band and sigma bound spot checks; called by
    // picard_solve.
    void validate() const;
};

struct DualState {
    SpaceTimeField zeta;
    double epsilon = 0.0;
    std::vector<double> picard_history; // successive L2(0,T;X) increments
};

// Difference-quotient fields built from two candidate z = h(v) trajectories;
// sigma = q = 1 where |z1 - z2| <= floor, matching the z = 0 branch.
struct SigmaQFields {
    SpaceTimeField sigma;
    SpaceTimeField q;
    PressureField phi; // q * p, zero-extended
    double delta_sigma = 0.0;
    double c_sigma = 0.0;
    double c_q = 0.0;
    std::vector<EstimateReport> bound_reports;
};

SigmaQFields build_sigma_q(const SpaceTimeField& z1, const SpaceTimeField& z2,
                           const CoefficientSet& coeffs, const PressureField& p,
                           double floor = 1e-12);

// Integration path: mollifies the difference-quotient fields (clamp
// extension for sigma so its bounds survive, zero extension for phi) and
// estimates the sup norms by sampling.
DualCoefficients mollify_dual(const SigmaQFields& fields, const PressureField& xi,
                              double epsilon, int quad_points = 12);

// Gronwall/contraction constants computed from the proof formulas and the
// declared sup norms.
struct DualContractionConstants {
    double c1, c2, c3, c4, c5;
};

DualContractionConstants dual_constants(const DualCoefficients& duals);

// Backward Euler + centered second differences with Neumann ghost
// reflection; the phi dx(zeta_tilde) coupling is frozen at the supplied
// iterate. One tridiagonal solve per step.
SpaceTimeField solve_auxiliary(const DualCoefficients& duals, const SpaceTimeField& zeta_tilde,
                               const UniformGrid& grid, double dt);

// Picard iteration of the auxiliary solution map from zeta = 0 until the
// discrete L2(0,T;X) increment drops below tol.
DualState picard_solve(const DualCoefficients& duals, const UniformGrid& grid, double dt,
                       double tol, int max_iter);

// |zeta(t,x)| <= M t with M = margin_factor * sup|xi|, up to a
// time-discretization slack of 10 dt sup|xi|.
EstimateReport check_maximum_bound(const DualState& state, double xi_sup,
                                   double margin_factor = 1.05);

// Per-state energy sup_t 1/2 |dx zeta|^2 + (delta_sigma/4) int |dxx zeta|^2,
// the L4 gradient chain against the empirical ceiling, and the sweep
// variation ratio.
std::vector<EstimateReport> check_h1_bounds(const std::vector<DualState>& states,
                                            double delta_sigma);

// Discrete L2(0,T;X) norm (centered gradients, trapezoid in time).
double l2x_norm(const SpaceTimeField& field);

// Centered first/second differences with reflected ghost cells.
GridFunction centered_gradient(const GridFunction& gf);
GridFunction second_difference(const GridFunction& gf);

// CSV: iteration,increment_l2x
void write_dual_iters_csv(const std::vector<double>& history, std::ostream& os);

} // namespace fvmt
