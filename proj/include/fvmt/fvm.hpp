#pragma once

#include "fvmt/coefficients.hpp"
#include "fvmt/field.hpp"
#include "fvmt/grid.hpp"

#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace fvmt {

// The space-discretized Cauchy problem: n cells, cell-average initial data,
// a given (possibly mollified) pressure field, and the nonlinearities.
struct SemiDiscreteProblem {
    CoefficientSet coeffs;
    UniformGrid grid;
    PressureField pressure;
    GridFunction initial;
    double horizon = 0.0;

    void validate() const;
};

struct TimeStepConfig {
    double dt = 0.0;
    double newton_tol = 1e-10;     // max-norm residual
    int newton_max_iter = 50;
    bool conservative = true;      // h(v_new) - h(v_old) form; false: h'(v) dv form
    int max_halvings = 10;

    void validate(double horizon) const;
};

class StepFailure : public std::runtime_error {
public:
    StepFailure(const std::string& what, double residual, int iterations)
        : std::runtime_error(what), residual_(residual), iterations_(iterations) {}
    double residual() const { return residual_; }
    int iterations() const { return iterations_; }

private:
    double residual_;
    int iterations_;
};

// Flux through the interface between two adjacent cells:
// (v_right - v_left)/dx + b((v_left + v_right)/2) * p_cell,
// where p_cell is the left cell's pressure average.
double interface_flux(double v_left, double v_right, double p_cell, double dx,
                      const CoefficientSet& coeffs);

// d/dt v of the semi-discrete system; boundary fluxes are identically zero.
GridFunction semi_discrete_rhs(const GridFunction& state, const GridFunction& pressure_cells,
                               const SemiDiscreteProblem& problem);

// Cell averages of the problem's pressure at time t. Uses the separable
// factorization when the field carries one; otherwise projects the field
// directly. Values agree with mollified_cell_averages up to roundoff.
class PressureSampler {
public:
    PressureSampler(const PressureField& pressure, const UniformGrid& grid, int quad_points = 8);
    GridFunction at(double t) const;

private:
    const PressureField* pressure_;
    UniformGrid grid_;
    int quad_points_;
    bool separable_ = false;
    double offset_ = 0.0;
    std::vector<double> space_avg_;
};

// One conservative backward-Euler step of length cfg.dt starting at time t:
// solves h(v_new) - h(v_old) = dt * (flux differences at v_new), pressure at
// t + dt, by Newton iteration on the tridiagonal system. Throws StepFailure
// on divergence.
GridFunction step_implicit(const GridFunction& state, double t, const TimeStepConfig& cfg,
                           const SemiDiscreteProblem& problem);

struct RunLogRow {
    long step = 0;
    double t = 0.0;
    double dt = 0.0;
    int newton_iters = 0;
    double mass = 0.0;
    double mass_drift = 0.0;
};

struct SolveResult {
    SpaceTimeField trajectory;
    SpaceTimeField pressure_cells; // cell averages used at each stored time
    std::vector<RunLogRow> runlog;
};

// Marches step_implicit from 0 to T storing every frame; the last step is
// shortened to land on T exactly. Steps that fail Newton are retried as two
// half-steps, up to cfg.max_halvings levels deep.
SolveResult solve(const SemiDiscreteProblem& problem, const TimeStepConfig& cfg);

// sum dx * h(v_i): the discrete mass that the conservative stepping keeps
// invariant under the no-flux boundaries.
double discrete_mass(const GridFunction& state, const CoefficientSet& coeffs);

// CSV: step,t,dt,newton_iters,mass,mass_drift
void write_runlog_csv(const std::vector<RunLogRow>& rows, std::ostream& os);

} // namespace fvmt
