// Conservative implicit time stepping for the semi-discrete moisture
// transport system. Backward Euler is applied to the mass variable h(v), so
// the per-step update is a telescoping flux difference and the discrete mass
// sum dx*h(v_i) is invariant up to the Newton residual.

#include "fvmt/fvm.hpp"

#include "fvmt/csv.hpp"
#include "fvmt/kernels.hpp"
#include "fvmt/mollifier.hpp"
#include "fvmt/quadrature.hpp"

#include <cmath>
#include <limits>

namespace fvmt {

void SemiDiscreteProblem::validate() const {
    if (!(initial.grid() == grid))
        throw std::invalid_argument("SemiDiscreteProblem: initial data grid mismatch");
    if (horizon <= 0.0) throw std::invalid_argument("SemiDiscreteProblem: horizon must be positive");
    if (pressure.horizon() < horizon - 1e-12)
        throw std::invalid_argument("SemiDiscreteProblem: pressure horizon too short");
    initial.check_finite("SemiDiscreteProblem initial data");
}

void TimeStepConfig::validate(double horizon) const {
    if (dt <= 0.0 || dt > horizon + 1e-15)
        throw std::invalid_argument("TimeStepConfig: need 0 < dt <= T");
    if (newton_tol <= 0.0) throw std::invalid_argument("TimeStepConfig: newton_tol must be positive");
    if (newton_max_iter < 1) throw std::invalid_argument("TimeStepConfig: newton_max_iter >= 1");
}

double interface_flux(double v_left, double v_right, double p_cell, double dx,
                      const CoefficientSet& coeffs) {
    if (dx <= 0.0) throw std::invalid_argument("interface_flux: dx must be positive");
    return (v_right - v_left) / dx + coeffs.b(0.5 * (v_left + v_right)) * p_cell;
}

namespace {

// Interface fluxes F_1..F_{n-1}; flux i (0-based) sits between cells i and
// i+1 and uses the LEFT cell's pressure average.
void assemble_fluxes(const GridFunction& v, const GridFunction& pcells,
                     const CoefficientSet& coeffs, std::vector<double>& bmid,
                     std::vector<double>& flux) {
    const int n = v.size();
    bmid.resize(n - 1);
    flux.resize(n - 1);
    for (int i = 0; i < n - 1; ++i) bmid[i] = coeffs.b(0.5 * (v[i] + v[i + 1]));
    kernels::combine_flux(v.data(), bmid.data(), pcells.data(), flux.data(), n - 1,
                          1.0 / v.grid().dx);
}

struct Workspace {
    std::vector<double> hold, bmid, flux, residual, diag, lower, upper, rhs, update;
};

// Tridiagonal solve (Thomas); diag/rhs are clobbered.
void thomas(std::vector<double>& lower, std::vector<double>& diag, std::vector<double>& upper,
            std::vector<double>& rhs, std::vector<double>& x) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        if (diag[i - 1] == 0.0) throw StepFailure("tridiagonal pivot is zero", 0.0, 0);
        double w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    if (diag[n - 1] == 0.0) throw StepFailure("tridiagonal pivot is zero", 0.0, 0);
    x.resize(n);
    x[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = (rhs[i] - upper[i] * x[i + 1]) / diag[i];
}

// One implicit step given the pressure cell averages at the target time.
// Returns the Newton iteration count.
int newton_step(GridFunction& v, const GridFunction& pcells, double dt,
                const TimeStepConfig& cfg, const SemiDiscreteProblem& problem, Workspace& ws) {
    const CoefficientSet& cs = problem.coeffs;
    const int n = v.size();
    const double dx = v.grid().dx;
    const double r = dt / dx;

    ws.hold.resize(n);
    for (int i = 0; i < n; ++i) ws.hold[i] = cs.h(v[i]);
    // Non-conservative form needs the previous state itself.
    std::vector<double> vold;
    if (!cfg.conservative) vold.assign(v.data(), v.data() + n);

    auto compute_residual = [&]() {
        assemble_fluxes(v, pcells, cs, ws.bmid, ws.flux);
        ws.residual.resize(n);
        for (int i = 0; i < n; ++i) {
            const double f_right = (i < n - 1) ? ws.flux[i] : 0.0;
            const double f_left = (i > 0) ? ws.flux[i - 1] : 0.0;
            const double accum = cfg.conservative ? cs.h(v[i]) - ws.hold[i]
                                                  : cs.dh(v[i]) * (v[i] - vold[i]);
            ws.residual[i] = accum - r * (f_right - f_left);
        }
        return kernels::max_abs(ws.residual.data(), n);
    };

    auto newton_update = [&]() {
        ws.diag.resize(n);
        ws.lower.assign(n, 0.0);
        ws.upper.assign(n, 0.0);
        ws.rhs.resize(n);
        const double inv_dx = 1.0 / dx;
        for (int i = 0; i < n; ++i) {
            // dF[i]/dv[i] = -1/dx + b'(mid)/2 * p;  dF[i]/dv[i+1] = +1/dx + b'(mid)/2 * p
            double dfr_dvi = 0.0, dfr_dvip = 0.0, dfl_dvi = 0.0, dfl_dvim = 0.0;
            if (i < n - 1) {
                const double dbp = 0.5 * cs.db(0.5 * (v[i] + v[i + 1])) * pcells[i];
                dfr_dvi = -inv_dx + dbp;
                dfr_dvip = inv_dx + dbp;
            }
            if (i > 0) {
                const double dbp = 0.5 * cs.db(0.5 * (v[i - 1] + v[i])) * pcells[i - 1];
                dfl_dvim = -inv_dx + dbp;
                dfl_dvi = inv_dx + dbp;
            }
            const double accum_deriv =
                cfg.conservative ? cs.dh(v[i])
                                 : cs.ddh(v[i]) * (v[i] - vold[i]) + cs.dh(v[i]);
            ws.diag[i] = accum_deriv - r * (dfr_dvi - dfl_dvi);
            if (i < n - 1) ws.upper[i] = -r * dfr_dvip;
            if (i > 0) ws.lower[i] = r * dfl_dvim;
            ws.rhs[i] = -ws.residual[i];
        }
        thomas(ws.lower, ws.diag, ws.upper, ws.rhs, ws.update);
        kernels::axpy(1.0, ws.update.data(), v.data(), n);
    };

    double res = compute_residual();
    double prev = std::numeric_limits<double>::infinity();
    int growth = 0;
    for (int it = 0; it <= cfg.newton_max_iter; ++it) {
        if (res <= cfg.newton_tol) {
            if (res == 0.0) return it;
            // One polishing update: Newton is in its quadratic regime here,
            // so this drives the residual toward machine level and keeps the
            // accumulated mass drift far below the per-step tolerance.
            std::vector<double> saved(v.data(), v.data() + n);
            newton_update();
            double res2 = compute_residual();
            if (res2 > res) std::copy(saved.begin(), saved.end(), v.data());
            return it + 1;
        }
        if (it == cfg.newton_max_iter) break;
        if (res > prev) {
            if (++growth >= 5)
                throw StepFailure("Newton residual grew for 5 consecutive iterations", res, it);
        } else {
            growth = 0;
        }
        prev = res;
        newton_update();
        res = compute_residual();
    }
    throw StepFailure("Newton iteration cap exceeded", res, cfg.newton_max_iter);
}

} // namespace

PressureSampler::PressureSampler(const PressureField& pressure, const UniformGrid& grid,
                                 int quad_points)
    : pressure_(&pressure), grid_(grid), quad_points_(quad_points) {
    if (pressure.parts().has_value()) {
        separable_ = true;
        offset_ = pressure.parts()->offset;
        // The cells live inside [0, 1], so the spatial factor never sees the
        // extension; its cell averages are time-independent.
        GridFunction avg = project_cell_averages(pressure.parts()->fx, grid_, quad_points_);
        space_avg_ = avg.values();
    }
}

GridFunction PressureSampler::at(double t) const {
    if (separable_) {
        double ft;
        switch (pressure_->extension()) {
        case Extension::zero:
            ft = (t < 0.0 || t > pressure_->horizon()) ? 0.0 : pressure_->parts()->ft(t);
            break;
        case Extension::clamp:
            ft = pressure_->parts()->ft(std::clamp(t, 0.0, pressure_->horizon()));
            break;
        default:
            ft = pressure_->parts()->ft(t);
        }
        GridFunction out(grid_, 0.0);
        for (int i = 0; i < grid_.n; ++i) out[i] = offset_ + ft * space_avg_[i];
        return out;
    }
    return project_cell_averages([&](double x) { return (*pressure_)(t, x); }, grid_,
                                 quad_points_);
}

GridFunction semi_discrete_rhs(const GridFunction& state, const GridFunction& pressure_cells,
                               const SemiDiscreteProblem& problem) {
    if (!(state.grid() == problem.grid) || !(pressure_cells.grid() == problem.grid))
        throw std::invalid_argument("semi_discrete_rhs: grid mismatch");
    const int n = state.size();
    std::vector<double> bmid, flux;
    assemble_fluxes(state, pressure_cells, problem.coeffs, bmid, flux);
    GridFunction out(problem.grid, 0.0);
    const double inv_dx = 1.0 / problem.grid.dx;
    for (int i = 0; i < n; ++i) {
        const double f_right = (i < n - 1) ? flux[i] : 0.0;
        const double f_left = (i > 0) ? flux[i - 1] : 0.0;
        out[i] = (f_right - f_left) * inv_dx / problem.coeffs.dh(state[i]);
    }
    return out;
}

GridFunction step_implicit(const GridFunction& state, double t, const TimeStepConfig& cfg,
                           const SemiDiscreteProblem& problem) {
    cfg.validate(problem.horizon);
    if (t + cfg.dt > problem.horizon + 1e-12)
        throw std::invalid_argument("step_implicit: step leaves [0, T]");
    PressureSampler sampler(problem.pressure, problem.grid);
    GridFunction pcells = sampler.at(t + cfg.dt);
    GridFunction next = state;
    Workspace ws;
    newton_step(next, pcells, cfg.dt, cfg, problem, ws);
    return next;
}

double discrete_mass(const GridFunction& state, const CoefficientSet& coeffs) {
    std::vector<double> hv(state.size());
    for (int i = 0; i < state.size(); ++i) hv[i] = coeffs.h(state[i]);
    return state.grid().dx * kernels::sum(hv.data(), hv.size());
}

namespace {

// Advances one coarse step, retrying as two half-steps on Newton failure.
int advance(GridFunction& state, double t0, double dt, int depth, const TimeStepConfig& cfg,
            const SemiDiscreteProblem& problem, const PressureSampler& sampler, Workspace& ws) {
    GridFunction pcells = sampler.at(t0 + dt);
    GridFunction attempt = state;
    try {
        int iters = newton_step(attempt, pcells, dt, cfg, problem, ws);
        state = std::move(attempt);
        return iters;
    } catch (const StepFailure&) {
        if (depth >= cfg.max_halvings) throw;
        int it1 = advance(state, t0, 0.5 * dt, depth + 1, cfg, problem, sampler, ws);
        int it2 = advance(state, t0 + 0.5 * dt, 0.5 * dt, depth + 1, cfg, problem, sampler, ws);
        return it1 + it2;
    }
}

} // namespace

SolveResult solve(const SemiDiscreteProblem& problem, const TimeStepConfig& cfg) {
    problem.validate();
    cfg.validate(problem.horizon);
    const double T = problem.horizon;
    const long nsteps = static_cast<long>(std::ceil(T / cfg.dt - 1e-12));

    PressureSampler sampler(problem.pressure, problem.grid);
    Workspace ws;

    SolveResult out;
    out.trajectory.grid = problem.grid;
    out.pressure_cells.grid = problem.grid;
    out.trajectory.times.push_back(0.0);
    out.trajectory.frames.push_back(problem.initial);
    out.pressure_cells.times.push_back(0.0);
    out.pressure_cells.frames.push_back(sampler.at(0.0));

    GridFunction state = problem.initial;
    const double mass0 = discrete_mass(state, problem.coeffs);
    out.runlog.push_back({0, 0.0, 0.0, 0, mass0, 0.0});

    double t = 0.0;
    for (long k = 1; k <= nsteps; ++k) {
        const double target = std::min(static_cast<double>(k) * cfg.dt, T);
        const double dt_k = target - t;
        int iters = advance(state, t, dt_k, 0, cfg, problem, sampler, ws);
        t = target;
        state.check_finite("solve");
        out.trajectory.times.push_back(t);
        out.trajectory.frames.push_back(state);
        out.pressure_cells.times.push_back(t);
        out.pressure_cells.frames.push_back(sampler.at(t));
        const double mass = discrete_mass(state, problem.coeffs);
        out.runlog.push_back({k, t, dt_k, iters, mass, mass - mass0});
    }
    return out;
}

void write_runlog_csv(const std::vector<RunLogRow>& rows, std::ostream& os) {
    os << "step,t,dt,newton_iters,mass,mass_drift\n";
    for (const auto& r : rows)
        CsvRow(os).cell(static_cast<long long>(r.step)).cell(r.t).cell(r.dt).cell(r.newton_iters)
            .cell(r.mass).cell(r.mass_drift);
}

} // namespace fvmt
