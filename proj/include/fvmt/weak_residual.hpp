#pragma once

#include "fvmt/coefficients.hpp"
#include "fvmt/field.hpp"
#include "fvmt/fvm.hpp"
#include "fvmt/grid.hpp"
#include "fvmt/weak_residual_types.hpp"

#include <functional>
#include <ostream>
#include <vector>

namespace fvmt {

// Finite surrogate for the space of admissible test functions:
// (1 - t/T) cos(k pi x) and (1 - t/T)^2 cos(k pi x) for k = 0..k_max.
// All members vanish at t = T and have closed-form derivatives.
std::vector<TestFunction> default_family(double horizon, int k_max);

struct ResidualQuad {
    int space_points = 6; // per-cell Gauss order for eta and its derivatives
};

// lhs - rhs of the weak identity
//   -intint h(v) dt_eta + intint (vtilde + b(v) p) dx_eta = int h(v0) eta(0,.)
// with the divided difference as the gradient surrogate, per-cell Gauss
// quadrature in space and trapezoid in time.
double residual(const SpaceTimeField& traj, const PressureField& pressure,
                const CoefficientSet& coeffs, const GridFunction& initial,
                const TestFunction& eta, const ResidualQuad& quad = {});

struct ConvergenceRow {
    std::string label;
    int n = 0;
    double delta = 0.0;
    double dt = 0.0;
    double value = 0.0;  // error metric for the row
    double ratio = 0.0;  // previous value / this value; 0 on the first row
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
};

// CSV: level,n,delta,dt,value,ratio
void write_convergence_csv(const ConvergenceTable& table, std::ostream& os);

struct ResidualSweepConfig {
    std::function<SemiDiscreteProblem(int n)> make_problem;
    std::vector<int> levels;       // increasing cell counts
    double dt_constant = 0.4;      // dt = c * dx^2
    int k_max = 3;
    TimeStepConfig step;           // dt overridden per level
};

// Solves at each level and reports the max-over-family residual with
// per-level ratios.
ConvergenceTable residual_sweep(const ResidualSweepConfig& cfg);

} // namespace fvmt
