#include "fvmt/weak_residual.hpp"

#include "fvmt/csv.hpp"
#include "fvmt/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace fvmt {

std::vector<TestFunction> default_family(double horizon, int k_max) {
    if (k_max < 1) throw std::invalid_argument("default_family: k_max >= 1");
    const double T = horizon;
    std::vector<TestFunction> family;
    for (int power = 1; power <= 2; ++power) {
        for (int k = 0; k <= k_max; ++k) {
            const double kpi = k * M_PI;
            TestFunction f;
            TestFunction::Product prod;
            prod.sx = [kpi](double x) { return std::cos(kpi * x); };
            prod.dsx = [kpi](double x) { return -kpi * std::sin(kpi * x); };
            if (power == 1) {
                prod.tf = [T](double t) { return 1.0 - t / T; };
                prod.dtf = [T](double) { return -1.0 / T; };
                f.label = "lin_k" + std::to_string(k);
            } else {
                prod.tf = [T](double t) {
                    const double w = 1.0 - t / T;
                    return w * w;
                };
                prod.dtf = [T](double t) { return -2.0 * (1.0 - t / T) / T; };
                f.label = "quad_k" + std::to_string(k);
            }
            auto tf = prod.tf, dtf = prod.dtf, sx = prod.sx, dsx = prod.dsx;
            f.eval = [tf, sx](double t, double x) { return tf(t) * sx(x); };
            f.dt_eval = [dtf, sx](double t, double x) { return dtf(t) * sx(x); };
            f.dx_eval = [tf, dsx](double t, double x) { return tf(t) * dsx(x); };
            f.product = std::move(prod);
            family.push_back(std::move(f));
        }
    }
    return family;
}

double residual(const SpaceTimeField& traj, const PressureField& pressure,
                const CoefficientSet& coeffs, const GridFunction& initial,
                const TestFunction& eta, const ResidualQuad& quad) {
    traj.validate();
    if (traj.times.size() < 8)
        throw std::invalid_argument("residual: need at least 8 frames for the time quadrature");
    const UniformGrid& grid = traj.grid;
    const GaussRule& rule = gauss_legendre(quad.space_points);

    // Fast path: eta = tf(t) sx(x) and separable pressure let the per-cell
    // spatial moments be computed once and reused across frames.
    const bool p_separable =
        pressure.parts().has_value() &&
        (pressure.extension() != Extension::zero || pressure.parts()->offset == 0.0);
    std::vector<double> time_term(traj.times.size());
    std::vector<double> space_term(traj.times.size());

    if (eta.product && p_separable) {
        const auto& prod = *eta.product;
        const auto& parts = *pressure.parts();
        std::vector<double> i_sx(grid.n), i_dsx(grid.n), i_fxdsx(grid.n);
        for (int i = 0; i < grid.n; ++i) {
            const double mid = grid.x_center(i);
            const double half = 0.5 * grid.dx;
            double a = 0.0, b = 0.0, c = 0.0;
            for (std::size_t m = 0; m < rule.nodes.size(); ++m) {
                const double x = mid + half * rule.nodes[m];
                const double w = rule.weights[m] * half;
                a += w * prod.sx(x);
                b += w * prod.dsx(x);
                c += w * parts.fx(x) * prod.dsx(x);
            }
            i_sx[i] = a;
            i_dsx[i] = b;
            i_fxdsx[i] = c;
        }
        for (std::size_t k = 0; k < traj.times.size(); ++k) {
            const double t = traj.times[k];
            const GridFunction& v = traj.frames[k];
            GridFunction vt = divided_difference(v);
            const double tf = prod.tf(t), dtf = prod.dtf(t);
            const double p_tf = parts.ft(t);
            double acc_time = 0.0, flux_plain = 0.0, flux_fx = 0.0;
            for (int i = 0; i < grid.n; ++i) {
                const double bv = coeffs.b(v[i]);
                acc_time += coeffs.h(v[i]) * i_sx[i];
                flux_plain += (vt[i] + bv * parts.offset) * i_dsx[i];
                flux_fx += bv * i_fxdsx[i];
            }
            time_term[k] = dtf * acc_time;
            space_term[k] = tf * (flux_plain + p_tf * flux_fx);
            if (!std::isfinite(time_term[k]) || !std::isfinite(space_term[k]))
                throw NumericalFailure("residual: non-finite intermediate", time_term[k]);
        }
    } else {
        for (std::size_t k = 0; k < traj.times.size(); ++k) {
            const double t = traj.times[k];
            const GridFunction& v = traj.frames[k];
            GridFunction vt = divided_difference(v);
            double acc_time = 0.0, acc_space = 0.0;
            for (int i = 0; i < grid.n; ++i) {
                const double hv = coeffs.h(v[i]);
                const double bv = coeffs.b(v[i]);
                const double mid = grid.x_center(i);
                const double half = 0.5 * grid.dx;
                double cell_dt_eta = 0.0;   // int_cell dt_eta
                double cell_flux_eta = 0.0; // int_cell (vtilde + b(v) rho) dx_eta
                for (std::size_t m = 0; m < rule.nodes.size(); ++m) {
                    const double x = mid + half * rule.nodes[m];
                    const double w = rule.weights[m] * half;
                    cell_dt_eta += w * eta.dt_eval(t, x);
                    cell_flux_eta += w * (vt[i] + bv * pressure(t, x)) * eta.dx_eval(t, x);
                }
                acc_time += hv * cell_dt_eta;
                acc_space += cell_flux_eta;
            }
            if (!std::isfinite(acc_time) || !std::isfinite(acc_space))
                throw NumericalFailure("residual: non-finite intermediate", acc_time);
            time_term[k] = acc_time;
            space_term[k] = acc_space;
        }
    }
    double lhs = 0.0;
    for (std::size_t k = 1; k < traj.times.size(); ++k) {
        const double w = 0.5 * (traj.times[k] - traj.times[k - 1]);
        lhs += w * (-(time_term[k] + time_term[k - 1]) + space_term[k] + space_term[k - 1]);
    }

    // rhs: int h(v0) eta(0, .)
    double rhs = 0.0;
    for (int i = 0; i < grid.n; ++i) {
        const double mid = grid.x_center(i);
        const double half = 0.5 * grid.dx;
        double cell_eta0 = 0.0;
        for (std::size_t m = 0; m < rule.nodes.size(); ++m)
            cell_eta0 += rule.weights[m] * half * eta.eval(0.0, mid + half * rule.nodes[m]);
        rhs += coeffs.h(initial[i]) * cell_eta0;
    }
    return lhs - rhs;
}

void write_convergence_csv(const ConvergenceTable& table, std::ostream& os) {
    os << "level,n,delta,dt,value,ratio\n";
    for (const auto& r : table.rows)
        CsvRow(os).cell(r.label).cell(r.n).cell(r.delta).cell(r.dt).cell(r.value).cell(r.ratio);
}

ConvergenceTable residual_sweep(const ResidualSweepConfig& cfg) {
    if (cfg.levels.size() < 2) throw std::invalid_argument("residual_sweep: need >= 2 levels");
    for (std::size_t i = 1; i < cfg.levels.size(); ++i)
        if (cfg.levels[i] <= cfg.levels[i - 1])
            throw std::invalid_argument("residual_sweep: levels must increase");

    ConvergenceTable table;
    double prev = 0.0;
    for (std::size_t li = 0; li < cfg.levels.size(); ++li) {
        const int n = cfg.levels[li];
        SemiDiscreteProblem problem = cfg.make_problem(n);
        TimeStepConfig step = cfg.step;
        step.dt = cfg.dt_constant * problem.grid.dx * problem.grid.dx;
        SolveResult sol = solve(problem, step);
        const auto family = default_family(problem.horizon, cfg.k_max);
        double worst = 0.0;
        for (const auto& eta : family)
            worst = std::max(worst, std::abs(residual(sol.trajectory, problem.pressure,
                                                      problem.coeffs, problem.initial, eta)));
        ConvergenceRow row;
        row.label = "level" + std::to_string(li);
        row.n = n;
        row.dt = step.dt;
        row.value = worst;
        row.ratio = (li == 0 || worst == 0.0) ? 0.0 : prev / worst;
        prev = worst;
        table.rows.push_back(row);
    }
    return table;
}

} // namespace fvmt
