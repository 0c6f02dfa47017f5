#include "fvmt/estimates.hpp"

#include "fvmt/fvm.hpp"
#include "fvmt/kernels.hpp"
#include "fvmt/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fvmt {

namespace {

void check_aligned(const SpaceTimeField& a, const SpaceTimeField& b, const char* what) {
    a.validate();
    b.validate();
    if (!(a.grid == b.grid) || a.times.size() != b.times.size())
        throw std::invalid_argument(std::string(what) + ": misaligned inputs");
    for (std::size_t k = 0; k < a.times.size(); ++k)
        if (std::abs(a.times[k] - b.times[k]) > 1e-12 * (1.0 + a.horizon()))
            throw std::invalid_argument(std::string(what) + ": time grids differ");
}

double max_dt(const SpaceTimeField& f) {
    double m = 0.0;
    for (std::size_t k = 1; k < f.times.size(); ++k)
        m = std::max(m, f.times[k] - f.times[k - 1]);
    return m;
}

double trapezoid(const std::vector<double>& times, const std::vector<double>& values) {
    double acc = 0.0;
    for (std::size_t k = 1; k < times.size(); ++k)
        acc += 0.5 * (values[k] + values[k - 1]) * (times[k] - times[k - 1]);
    return acc;
}

double hhat_cell_integral(const CoefficientSet& coeffs, const GridFunction& state) {
    double acc = 0.0;
    for (int i = 0; i < state.size(); ++i) acc += h_hat(coeffs, coeffs.h(state[i]));
    return acc * state.grid().dx;
}

// intint |vtilde|^2 by trapezoid in time of the per-frame divided-difference
// energy.
double divided_difference_energy(const SpaceTimeField& traj) {
    std::vector<double> per_frame(traj.times.size());
    for (std::size_t k = 0; k < traj.frames.size(); ++k) {
        GridFunction d = divided_difference(traj.frames[k]);
        per_frame[k] = traj.grid.dx * kernels::sum_squares(d.data(), d.size());
    }
    return trapezoid(traj.times, per_frame);
}

SpaceTimeField map_frames(const SpaceTimeField& traj,
                          const std::function<double(double)>& f) {
    SpaceTimeField out;
    out.grid = traj.grid;
    out.times = traj.times;
    out.frames.reserve(traj.frames.size());
    for (const auto& fr : traj.frames) {
        GridFunction g(traj.grid, 0.0);
        for (int i = 0; i < g.size(); ++i) g[i] = f(fr[i]);
        out.frames.push_back(std::move(g));
    }
    return out;
}

} // namespace

EstimateReport energy_budget(const SpaceTimeField& traj, const SpaceTimeField& rho_cells,
                             const CoefficientSet& coeffs) {
    check_aligned(traj, rho_cells, "energy_budget");

    const double hhat_final = hhat_cell_integral(coeffs, traj.frames.back());
    const double hhat_initial = hhat_cell_integral(coeffs, traj.frames.front());
    const double grad_energy = divided_difference_energy(traj);

    // (C_b^2/2) intint |rho(t, x - dx)|^2: the shifted field covers cells
    // 1..n-1, i.e. drops the last cell's value.
    std::vector<double> rho_sq(rho_cells.times.size());
    for (std::size_t k = 0; k < rho_cells.frames.size(); ++k) {
        const GridFunction& r = rho_cells.frames[k];
        rho_sq[k] = rho_cells.grid.dx * kernels::sum_squares(r.data(), r.size() - 1);
    }
    const double rho_term = 0.5 * coeffs.c_b * coeffs.c_b * trapezoid(rho_cells.times, rho_sq);

    const double lhs = hhat_final + 0.5 * grad_energy;
    const double rhs = rho_term + hhat_initial;
    // First-order allowance for the trapezoid/backward-Euler time error.
    const double slack = (1e-6 + max_dt(traj)) * (1.0 + std::abs(rhs));
    return EstimateReport::make("energy_budget", lhs, rhs, slack);
}

double c15_candidate(const CoefficientSet& coeffs, const GridFunction& initial,
                     double pressure_l2) {
    const HhatConstants hc = hhat_constants(coeffs);
    std::vector<double> hv(initial.size());
    for (int i = 0; i < initial.size(); ++i) hv[i] = coeffs.h(initial[i]);
    const double h0_sq = initial.grid().dx * kernels::sum_squares(hv.data(), hv.size());
    const double energy =
        0.5 * coeffs.c_b * coeffs.c_b * pressure_l2 * pressure_l2 + hc.c13 * h0_sq + hc.c14;
    // Chained proof bounds for the four quantities; the z-difference-quotient
    // chain needs the extra 2 C_h^2 E term.
    const double bound_v = hc.c11 * energy + hc.c12;
    const double bound_z =
        4.0 * coeffs.c_h * energy + 4.0 * coeffs.c_h * coeffs.c_h * hc.h_inv_zero * hc.h_inv_zero;
    const double bound_vtilde = 2.0 * energy;
    const double bound_ztilde = 2.0 * coeffs.c_h * coeffs.c_h * energy;
    return std::max({bound_v, bound_z, bound_vtilde, bound_ztilde});
}

std::vector<EstimateReport> uniform_bounds(const SpaceTimeField& traj,
                                           const CoefficientSet& coeffs, double pressure_l2) {
    traj.validate();
    const double c15 = c15_candidate(coeffs, traj.frames.front(), pressure_l2);

    double sup_v = 0.0, sup_z = 0.0;
    for (const auto& frame : traj.frames) {
        sup_v = std::max(sup_v, traj.grid.dx * kernels::sum_squares(frame.data(), frame.size()));
        std::vector<double> z(frame.size());
        for (int i = 0; i < frame.size(); ++i) z[i] = coeffs.h(frame[i]);
        sup_z = std::max(sup_z, traj.grid.dx * kernels::sum_squares(z.data(), z.size()));
    }
    const double vtilde_energy = divided_difference_energy(traj);
    const SpaceTimeField z_traj = map_frames(traj, coeffs.h);
    const double ztilde_energy = divided_difference_energy(z_traj);

    const double slack = (1e-6 + max_dt(traj)) * (1.0 + c15);
    std::vector<EstimateReport> out;
    out.push_back(EstimateReport::make("uniform_sup_v_sq", sup_v, c15, slack));
    out.push_back(EstimateReport::make("uniform_sup_z_sq", sup_z, c15, slack));
    out.push_back(EstimateReport::make("uniform_vtilde_energy", vtilde_energy, c15, slack));
    out.push_back(EstimateReport::make("uniform_ztilde_energy", ztilde_energy, c15, slack));
    return out;
}

namespace {

// Cell averages of a smooth function of x at fixed t.
GridFunction project_at_time(const std::function<double(double, double)>& f, double t,
                             const UniformGrid& grid, int q) {
    return project_cell_averages([&](double x) { return f(t, x); }, grid, q);
}

double x_norm_sq_at_time(const TestFunction& eta, double t, const UniformGrid& grid, int q) {
    const GaussRule& rule = gauss_legendre(q);
    double acc = 0.0;
    for (int i = 0; i < grid.n; ++i) {
        const double mid = grid.x_center(i);
        const double half = 0.5 * grid.dx;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            const double x = mid + half * rule.nodes[k];
            const double e = eta.eval(t, x);
            const double ex = eta.dx_eval(t, x);
            acc += rule.weights[k] * half * (e * e + ex * ex);
        }
    }
    return acc;
}

} // namespace

double dual_pairing_flux_form(const SpaceTimeField& traj, const SpaceTimeField& rho_cells,
                              const CoefficientSet& coeffs, const TestFunction& eta) {
    check_aligned(traj, rho_cells, "dual_pairing_flux_form");
    const int n = traj.grid.n;
    const double dx = traj.grid.dx;
    // Product test functions: cell averages factor into tf(t) * sxbar_i.
    std::vector<double> sxbar;
    if (eta.product) {
        GridFunction avg = project_cell_averages(eta.product->sx, traj.grid, 6);
        sxbar = avg.values();
    }
    std::vector<double> per_frame(traj.times.size());
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const GridFunction& v = traj.frames[k];
        const GridFunction& p = rho_cells.frames[k];
        double s = 0.0;
        if (eta.product) {
            const double tf = eta.product->tf(traj.times[k]);
            for (int i = 0; i < n - 1; ++i) {
                const double f = interface_flux(v[i], v[i + 1], p[i], dx, coeffs);
                s += f * tf * (sxbar[i] - sxbar[i + 1]);
            }
        } else {
            GridFunction etabar = project_at_time(eta.eval, traj.times[k], traj.grid, 6);
            for (int i = 0; i < n - 1; ++i) {
                const double f = interface_flux(v[i], v[i + 1], p[i], dx, coeffs);
                s += f * (etabar[i] - etabar[i + 1]);
            }
        }
        per_frame[k] = s;
    }
    return trapezoid(traj.times, per_frame);
}

double dual_pairing_by_time_difference(const SpaceTimeField& traj,
                                       const CoefficientSet& coeffs, const TestFunction& eta) {
    traj.validate();
    double acc = 0.0;
    for (std::size_t k = 1; k < traj.times.size(); ++k) {
        const double tmid = 0.5 * (traj.times[k] + traj.times[k - 1]);
        GridFunction etabar = project_at_time(eta.eval, tmid, traj.grid, 6);
        const GridFunction& a = traj.frames[k - 1];
        const GridFunction& b = traj.frames[k];
        for (int i = 0; i < traj.grid.n; ++i)
            acc += traj.grid.dx * (coeffs.h(b[i]) - coeffs.h(a[i])) * etabar[i];
    }
    return acc;
}

EstimateReport dual_norm_bound(const SpaceTimeField& traj, const SpaceTimeField& rho_cells,
                               const CoefficientSet& coeffs,
                               const std::vector<TestFunction>& eta_family,
                               double pressure_l2) {
    if (eta_family.empty()) throw std::invalid_argument("dual_norm_bound: empty family");
    const double c17 = c15_candidate(coeffs, traj.frames.front(), pressure_l2) + pressure_l2;

    // Most binding member: largest pairing relative to its bound.
    EstimateReport worst;
    double worst_ratio = -1.0;
    for (const auto& eta : eta_family) {
        const double pairing = std::abs(dual_pairing_flux_form(traj, rho_cells, coeffs, eta));
        std::vector<double> xsq(traj.times.size());
        if (eta.product) {
            double xconst = 0.0;
            const GaussRule& rule = gauss_legendre(6);
            for (int i = 0; i < traj.grid.n; ++i) {
                const double mid = traj.grid.x_center(i);
                const double half = 0.5 * traj.grid.dx;
                for (std::size_t m = 0; m < rule.nodes.size(); ++m) {
                    const double x = mid + half * rule.nodes[m];
                    const double s = eta.product->sx(x), d = eta.product->dsx(x);
                    xconst += rule.weights[m] * half * (s * s + d * d);
                }
            }
            for (std::size_t k = 0; k < traj.times.size(); ++k) {
                const double tf = eta.product->tf(traj.times[k]);
                xsq[k] = tf * tf * xconst;
            }
        } else {
            for (std::size_t k = 0; k < traj.times.size(); ++k)
                xsq[k] = x_norm_sq_at_time(eta, traj.times[k], traj.grid, 6);
        }
        const double eta_norm = std::sqrt(trapezoid(traj.times, xsq));
        const double rhs = c17 * eta_norm;
        const double slack = (1e-6 + max_dt(traj)) * (1.0 + std::abs(rhs));
        const double ratio = pairing / (rhs + 1e-300);
        if (ratio > worst_ratio) {
            worst_ratio = ratio;
            worst = EstimateReport::make("dual_norm_bound[" + eta.label + "]", pairing, rhs, slack);
        }
    }
    return worst;
}

double PiecewiseLinear::linf() const {
    double m = 0.0;
    for (double v : knot_values) m = std::max(m, std::abs(v));
    return m;
}

double PiecewiseLinear::l2() const {
    const std::size_t m = knot_values.size() - 1;
    const double dx = 1.0 / static_cast<double>(m);
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const double a = knot_values[j], b = knot_values[j + 1];
        acc += dx / 3.0 * (a * a + a * b + b * b);
    }
    return std::sqrt(acc);
}

double PiecewiseLinear::deriv_l2() const {
    const std::size_t m = knot_values.size() - 1;
    const double dx = 1.0 / static_cast<double>(m);
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const double s = (knot_values[j + 1] - knot_values[j]) / dx;
        acc += dx * s * s;
    }
    return std::sqrt(acc);
}

PiecewiseLinear interpolate_cell_centers(const GridFunction& gf) {
    const int n = gf.size();
    PiecewiseLinear pl;
    pl.knot_values.resize(n + 1);
    pl.knot_values[0] = gf[0];
    for (int j = 1; j < n; ++j) pl.knot_values[j] = 0.5 * (gf[j - 1] + gf[j]);
    pl.knot_values[n] = gf[n - 1];
    return pl;
}

EstimateReport gn_inequality_check(const PiecewiseLinear& u) {
    if (u.knot_values.size() < 2)
        throw std::invalid_argument("gn_inequality_check: need at least two knots");
    const double linf = u.linf();
    const double l2 = u.l2();
    const double dl2 = u.deriv_l2();
    const double lhs = linf * linf;
    const double rhs = l2 * l2 + 2.0 * l2 * dl2;
    return EstimateReport::make("gn_inequality", lhs, rhs, 1e-12 * (1.0 + rhs));
}

} // namespace fvmt
