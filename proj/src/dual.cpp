#include "fvmt/dual.hpp"

#include "fvmt/csv.hpp"
#include "fvmt/kernels.hpp"
#include "fvmt/mollifier.hpp"
#include "fvmt/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fvmt {

void DualCoefficients::validate() const {
    if (horizon <= 0.0) throw std::invalid_argument("DualCoefficients: horizon must be positive");
    if (delta_sigma <= 0.0 || c_sigma < delta_sigma)
        throw std::invalid_argument("DualCoefficients: sigma bounds invalid");
    // xi must vanish within distance 1e-3 of the cylinder boundary.
    const double band = 1e-3;
    const double tol = 1e-12 * (1.0 + xi_sup);
    for (int k = 0; k <= 24; ++k) {
        const double frac = k / 24.0;
        const double ts[] = {band * frac, horizon - band * frac};
        const double xs[] = {band * frac, 1.0 - band * frac};
        for (double tb : ts)
            for (int j = 0; j <= 24; ++j)
                if (std::abs(xi(tb, j / 24.0)) > tol)
                    throw std::invalid_argument("DualCoefficients: xi does not vanish near the boundary");
        for (double xb : xs)
            for (int j = 0; j <= 24; ++j)
                if (std::abs(xi(horizon * j / 24.0, xb)) > tol)
                    throw std::invalid_argument("DualCoefficients: xi does not vanish near the boundary");
    }
    // Spot-check the sigma bounds on a coarse lattice.
    for (int k = 0; k <= 16; ++k)
        for (int j = 0; j <= 16; ++j) {
            const double s = sigma_eps(horizon * k / 16.0, j / 16.0);
            if (s < delta_sigma - 1e-6 * (1.0 + c_sigma) || s > c_sigma + 1e-6 * (1.0 + c_sigma))
                throw std::invalid_argument("DualCoefficients: sigma_eps violates its bounds");
        }
}

GridFunction centered_gradient(const GridFunction& gf) {
    const int n = gf.size();
    const double inv2dx = 0.5 / gf.grid().dx;
    GridFunction out(gf.grid(), 0.0);
    for (int i = 0; i < n; ++i) {
        const double right = (i + 1 < n) ? gf[i + 1] : gf[n - 1]; // ghost reflection
        const double left = (i - 1 >= 0) ? gf[i - 1] : gf[0];
        out[i] = (right - left) * inv2dx;
    }
    return out;
}

GridFunction second_difference(const GridFunction& gf) {
    const int n = gf.size();
    const double inv_dx2 = 1.0 / (gf.grid().dx * gf.grid().dx);
    GridFunction out(gf.grid(), 0.0);
    for (int i = 0; i < n; ++i) {
        const double right = (i + 1 < n) ? gf[i + 1] : gf[n - 1];
        const double left = (i - 1 >= 0) ? gf[i - 1] : gf[0];
        out[i] = (right - 2.0 * gf[i] + left) * inv_dx2;
    }
    return out;
}

double l2x_norm(const SpaceTimeField& field) {
    field.validate();
    std::vector<double> xsq(field.times.size());
    for (std::size_t k = 0; k < field.frames.size(); ++k) {
        const GridFunction& f = field.frames[k];
        GridFunction g = centered_gradient(f);
        xsq[k] = field.grid.dx * (kernels::sum_squares(f.data(), f.size()) +
                                  kernels::sum_squares(g.data(), g.size()));
    }
    double acc = 0.0;
    for (std::size_t k = 1; k < field.times.size(); ++k)
        acc += 0.5 * (xsq[k] + xsq[k - 1]) * (field.times[k] - field.times[k - 1]);
    return std::sqrt(acc);
}

SigmaQFields build_sigma_q(const SpaceTimeField& z1, const SpaceTimeField& z2,
                           const CoefficientSet& coeffs, const PressureField& p, double floor) {
    z1.validate();
    z2.validate();
    if (!(z1.grid == z2.grid) || z1.times.size() != z2.times.size())
        throw std::invalid_argument("build_sigma_q: z1/z2 misaligned");
    if (floor <= 0.0) throw std::invalid_argument("build_sigma_q: floor must be positive");

    SigmaQFields out;
    out.sigma.grid = z1.grid;
    out.sigma.times = z1.times;
    out.q.grid = z1.grid;
    out.q.times = z1.times;
    out.delta_sigma = 1.0 / coeffs.c_h;
    out.c_sigma = 1.0 / coeffs.delta_h;
    out.c_q = coeffs.c_b / coeffs.delta_h;

    const double inv_tol = 1e-12;
    double sigma_min = 1e300, sigma_max = -1e300, q_max_abs = 0.0;
    bool any_quotient = false;
    for (std::size_t k = 0; k < z1.frames.size(); ++k) {
        GridFunction sframe(z1.grid, 1.0), qframe(z1.grid, 1.0);
        for (int i = 0; i < z1.grid.n; ++i) {
            const double a = z1.frames[k][i], b = z2.frames[k][i];
            const double d = a - b;
            if (std::abs(d) > floor) {
                const double ra = h_inverse(coeffs, a, inv_tol);
                const double rb = h_inverse(coeffs, b, inv_tol);
                sframe[i] = (ra - rb) / d;
                qframe[i] = (coeffs.b(ra) - coeffs.b(rb)) / d;
                any_quotient = true;
                sigma_min = std::min(sigma_min, sframe[i]);
                sigma_max = std::max(sigma_max, sframe[i]);
                q_max_abs = std::max(q_max_abs, std::abs(qframe[i]));
            }
        }
        out.sigma.frames.push_back(std::move(sframe));
        out.q.frames.push_back(std::move(qframe));
    }
    if (!any_quotient) {
        sigma_min = out.delta_sigma;
        sigma_max = out.c_sigma;
    }
    // Bound violations show up as failed reports; slack covers the h_inverse
    // tolerance.
    const double slack = 1e-9 * (1.0 + out.c_sigma);
    out.bound_reports.push_back(
        EstimateReport::make("sigma_lower", out.delta_sigma, sigma_min, slack));
    out.bound_reports.push_back(EstimateReport::make("sigma_upper", sigma_max, out.c_sigma, slack));
    out.bound_reports.push_back(EstimateReport::make("q_bound", q_max_abs, out.c_q, slack));

    // phi = q p with q reconstructed piecewise-constant in time and space.
    SpaceTimeField qcopy = out.q;
    PressureField pcopy = p;
    const double T = z1.horizon();
    out.phi = PressureField(
        [qcopy, pcopy](double t, double x) {
            const auto& times = qcopy.times;
            std::size_t k = std::upper_bound(times.begin(), times.end(), t) - times.begin();
            if (k > 0) --k;
            if (k >= qcopy.frames.size()) k = qcopy.frames.size() - 1;
            return reconstruct(qcopy.frames[k], std::clamp(x, 0.0, 1.0)) * pcopy(t, x);
        },
        T, p.regularity(), Extension::zero);
    return out;
}

DualCoefficients mollify_dual(const SigmaQFields& fields, const PressureField& xi,
                              double epsilon, int quad_points) {
    const double T = fields.sigma.horizon();
    SpaceTimeField sigma = fields.sigma;
    PressureField sigma_field(
        [sigma](double t, double x) {
            const auto& times = sigma.times;
            std::size_t k = std::upper_bound(times.begin(), times.end(), t) - times.begin();
            if (k > 0) --k;
            if (k >= sigma.frames.size()) k = sigma.frames.size() - 1;
            return reconstruct(sigma.frames[k], x);
        },
        T, Regularity::continuous, Extension::clamp);

    DualCoefficients duals;
    duals.sigma_eps = mollify(sigma_field, epsilon, quad_points, MollifyMode::tensor);
    duals.phi_eps = mollify(fields.phi, epsilon, quad_points, MollifyMode::tensor);
    duals.xi = xi;
    duals.horizon = T;
    duals.delta_sigma = fields.delta_sigma;
    duals.c_sigma = fields.c_sigma;
    duals.c_q = fields.c_q;

    // Desk-scale estimates of the sup norms by lattice sampling.
    const int m = 40;
    double xi_sup = 0.0, phi_sup = 0.0, sdx = 0.0, sdt = 0.0;
    const double eps_h = 1e-4;
    for (int k = 0; k <= m; ++k)
        for (int j = 0; j <= m; ++j) {
            const double t = T * k / m, x = static_cast<double>(j) / m;
            xi_sup = std::max(xi_sup, std::abs(duals.xi(t, x)));
            phi_sup = std::max(phi_sup, std::abs(duals.phi_eps(t, x)));
            sdx = std::max(sdx, std::abs(duals.sigma_eps(t, x + eps_h) -
                                         duals.sigma_eps(t, x - eps_h)) /
                                    (2.0 * eps_h));
            sdt = std::max(sdt, std::abs(duals.sigma_eps(t + eps_h, x) -
                                         duals.sigma_eps(t - eps_h, x)) /
                                    (2.0 * eps_h));
        }
    duals.xi_sup = xi_sup;
    duals.phi_sup = phi_sup;
    duals.sigma_dx_sup = sdx;
    duals.sigma_dt_sup = sdt;
    return duals;
}

DualContractionConstants dual_constants(const DualCoefficients& duals) {
    const double T = duals.horizon;
    const double ds = duals.delta_sigma;
    const double chat = duals.sigma_dx_sup;
    const double chat_t_sq = duals.sigma_dt_sup * duals.sigma_dt_sup;
    DualContractionConstants c{};
    c.c1 = 0.5 * duals.phi_sup * duals.phi_sup;
    c.c2 = chat * chat / (2.0 * ds) + c.c1 + 0.5;
    c.c3 = c.c2 * (2.0 * c.c2 * T * std::exp(2.0 * c.c2 * T) + 1.0);
    const double kk = chat_t_sq / (2.0 * ds) + chat * chat / ds;
    c.c4 = 2.0 * c.c1 * std::exp(2.0 * kk * T) + 2.0 * c.c1 +
           4.0 * c.c1 * kk * T * std::exp(2.0 * kk * T);
    c.c5 = 2.0 * c.c3 + 2.0 * c.c4 / ds;
    return c;
}

namespace {

struct DualGridData {
    std::vector<double> times;
    // [frame][cell] samples at cell centers; index 0 is t = 0 (unused by the
    // implicit update but kept for alignment).
    std::vector<std::vector<double>> sigma, phi, xi;
};

DualGridData discretize(const DualCoefficients& duals, const UniformGrid& grid, double dt) {
    if (dt <= 0.0 || dt > duals.horizon)
        throw std::invalid_argument("dual solver: need 0 < dt <= T");
    const double T = duals.horizon;
    const long nsteps = static_cast<long>(std::ceil(T / dt - 1e-12));
    DualGridData data;
    data.times.resize(nsteps + 1);
    data.sigma.resize(nsteps + 1);
    data.phi.resize(nsteps + 1);
    data.xi.resize(nsteps + 1);
    for (long k = 0; k <= nsteps; ++k) {
        const double t = (k == nsteps) ? T : k * dt;
        data.times[k] = t;
        data.sigma[k].resize(grid.n);
        data.phi[k].resize(grid.n);
        data.xi[k].resize(grid.n);
        for (int i = 0; i < grid.n; ++i) {
            const double x = grid.x_center(i);
            data.sigma[k][i] = duals.sigma_eps(t, x);
            data.phi[k][i] = duals.phi_eps(t, x);
            data.xi[k][i] = duals.xi(t, x);
            if (data.sigma[k][i] < duals.delta_sigma - 1e-6 * (1.0 + duals.c_sigma))
                throw NumericalFailure("dual solver: sigma sample below delta_sigma",
                                       data.sigma[k][i]);
        }
    }
    return data;
}

SpaceTimeField aux_solve_impl(const DualGridData& data,
                              const std::vector<GridFunction>* zeta_tilde,
                              const UniformGrid& grid) {
    const int n = grid.n;
    const double inv_dx2 = 1.0 / (grid.dx * grid.dx);
    const double inv2dx = 0.5 / grid.dx;

    SpaceTimeField out;
    out.grid = grid;
    out.times = data.times;
    out.frames.reserve(data.times.size());
    out.frames.emplace_back(grid, 0.0); // zero initial data

    std::vector<double> lower(n), diag(n), upper(n), rhs(n), sol(n);
    GridFunction state(grid, 0.0);
    for (std::size_t k = 1; k < data.times.size(); ++k) {
        const double dtk = data.times[k] - data.times[k - 1];
        const auto& sig = data.sigma[k];
        const auto& phi = data.phi[k];
        const auto& xi = data.xi[k];
        for (int i = 0; i < n; ++i) {
            // Coupling term, frozen at the supplied iterate (centered
            // gradient with reflected ghosts).
            double coupling = 0.0;
            if (zeta_tilde) {
                const GridFunction& zt = (*zeta_tilde)[k];
                const double right = (i + 1 < n) ? zt[i + 1] : zt[n - 1];
                const double left = (i - 1 >= 0) ? zt[i - 1] : zt[0];
                coupling = phi[i] * (right - left) * inv2dx;
            }
            rhs[i] = state[i] + dtk * (xi[i] + coupling);
            const double w = dtk * sig[i] * inv_dx2;
            const bool left_edge = (i == 0), right_edge = (i == n - 1);
            diag[i] = 1.0 + w * ((left_edge || right_edge) ? 1.0 : 2.0);
            lower[i] = left_edge ? 0.0 : -w;
            upper[i] = right_edge ? 0.0 : -w;
        }
        for (int i = 1; i < n; ++i) {
            const double m = lower[i] / diag[i - 1];
            diag[i] -= m * upper[i - 1];
            rhs[i] -= m * rhs[i - 1];
        }
        sol[n - 1] = rhs[n - 1] / diag[n - 1];
        for (int i = n - 2; i >= 0; --i) sol[i] = (rhs[i] - upper[i] * sol[i + 1]) / diag[i];
        for (int i = 0; i < n; ++i) state[i] = sol[i];
        out.frames.push_back(state);
    }
    return out;
}

} // namespace

SpaceTimeField solve_auxiliary(const DualCoefficients& duals, const SpaceTimeField& zeta_tilde,
                               const UniformGrid& grid, double dt) {
    DualGridData data = discretize(duals, grid, dt);
    zeta_tilde.validate();
    if (!(zeta_tilde.grid == grid) || zeta_tilde.times.size() != data.times.size())
        throw std::invalid_argument("solve_auxiliary: zeta_tilde incompatible with time grid");
    return aux_solve_impl(data, &zeta_tilde.frames, grid);
}

DualState picard_solve(const DualCoefficients& duals, const UniformGrid& grid, double dt,
                       double tol, int max_iter) {
    if (tol <= 0.0) throw std::invalid_argument("picard_solve: tol must be positive");
    duals.validate();
    DualGridData data = discretize(duals, grid, dt);

    SpaceTimeField current;
    current.grid = grid;
    current.times = data.times;
    current.frames.assign(data.times.size(), GridFunction(grid, 0.0));

    DualState state;
    for (int iter = 1; iter <= max_iter; ++iter) {
        SpaceTimeField next = aux_solve_impl(data, &current.frames, grid);
        SpaceTimeField diff;
        diff.grid = grid;
        diff.times = data.times;
        diff.frames.reserve(data.times.size());
        for (std::size_t k = 0; k < data.times.size(); ++k) {
            GridFunction d(grid, 0.0);
            for (int i = 0; i < grid.n; ++i) d[i] = next.frames[k][i] - current.frames[k][i];
            diff.frames.push_back(std::move(d));
        }
        const double inc = l2x_norm(diff);
        state.picard_history.push_back(inc);
        current = std::move(next);
        if (inc <= tol) {
            state.zeta = std::move(current);
            // The factorial contraction envelope forces the increments to
            // decrease after a burn-in of at most ceil(C5 T e) iterations.
            const auto& h = state.picard_history;
            std::size_t settle = 0;
            for (std::size_t k = 1; k < h.size(); ++k)
                if (h[k] > h[k - 1]) settle = k;
            const double cap = std::ceil(dual_constants(duals).c5 * duals.horizon * M_E);
            if (static_cast<double>(settle) > cap)
                throw NumericalFailure("picard_solve: increments still growing past the burn-in cap",
                                       h.back());
            return state;
        }
    }
    throw NumericalFailure(
        "picard_solve: no convergence within " + std::to_string(max_iter) +
            " iterations; last increment " + format_double(state.picard_history.back()),
        state.picard_history.back());
}

EstimateReport check_maximum_bound(const DualState& state, double xi_sup, double margin_factor) {
    if (margin_factor <= 1.0)
        throw std::invalid_argument("check_maximum_bound: margin_factor must exceed 1");
    const double m_const = margin_factor * xi_sup;
    double worst = -1e300;
    double dt_max = 0.0;
    for (std::size_t k = 1; k < state.zeta.times.size(); ++k)
        dt_max = std::max(dt_max, state.zeta.times[k] - state.zeta.times[k - 1]);
    for (std::size_t k = 0; k < state.zeta.times.size(); ++k) {
        const double t = state.zeta.times[k];
        const GridFunction& f = state.zeta.frames[k];
        for (int i = 0; i < f.size(); ++i)
            worst = std::max(worst, std::abs(f[i]) - m_const * t);
    }
    const double slack = 10.0 * dt_max * xi_sup;
    return EstimateReport::make("dual_maximum_bound", worst, 0.0, slack);
}

std::vector<EstimateReport> check_h1_bounds(const std::vector<DualState>& states,
                                            double delta_sigma) {
    if (states.empty()) throw std::invalid_argument("check_h1_bounds: empty sweep");
    std::vector<double> energies(states.size());
    std::vector<double> l4_fourth(states.size());
    for (std::size_t s = 0; s < states.size(); ++s) {
        const SpaceTimeField& z = states[s].zeta;
        double grad_sup = 0.0;
        std::vector<double> curv_sq(z.times.size()), grad4(z.times.size());
        for (std::size_t k = 0; k < z.frames.size(); ++k) {
            GridFunction g = centered_gradient(z.frames[k]);
            GridFunction c = second_difference(z.frames[k]);
            const double gsq = z.grid.dx * kernels::sum_squares(g.data(), g.size());
            grad_sup = std::max(grad_sup, 0.5 * gsq);
            curv_sq[k] = z.grid.dx * kernels::sum_squares(c.data(), c.size());
            double g4 = 0.0;
            for (int i = 0; i < g.size(); ++i) g4 += g[i] * g[i] * g[i] * g[i];
            grad4[k] = z.grid.dx * g4;
        }
        double curv_int = 0.0, l4 = 0.0;
        for (std::size_t k = 1; k < z.times.size(); ++k) {
            const double w = 0.5 * (z.times[k] - z.times[k - 1]);
            curv_int += w * (curv_sq[k] + curv_sq[k - 1]);
            l4 += w * (grad4[k] + grad4[k - 1]);
        }
        energies[s] = grad_sup + 0.25 * delta_sigma * curv_int;
        l4_fourth[s] = l4;
    }
    const double ceiling = *std::max_element(energies.begin(), energies.end());
    const double floor = *std::min_element(energies.begin(), energies.end());

    std::vector<EstimateReport> out;
    for (std::size_t s = 0; s < states.size(); ++s) {
        const std::string tag = "[eps=" + format_double(states[s].epsilon) + "]";
        out.push_back(EstimateReport::make("dual_h1_energy" + tag, energies[s], ceiling,
                                           1e-12 * (1.0 + ceiling)));
        const double l4_rhs =
            2.0 * ceiling * ceiling * states[s].zeta.horizon() + 4.0 * ceiling * ceiling / delta_sigma;
        out.push_back(EstimateReport::make("dual_l4_gradient_chain" + tag, l4_fourth[s], l4_rhs,
                                           1e-9 * (1.0 + l4_rhs)));
    }
    if (states.size() > 1) {
        const double ratio = (floor > 0.0) ? ceiling / floor : 1.0;
        out.push_back(EstimateReport::make("dual_h1_sweep_variation", ratio, 2.0, 0.0));
    }
    return out;
}

void write_dual_iters_csv(const std::vector<double>& history, std::ostream& os) {
    os << "iteration,increment_l2x\n";
    for (std::size_t k = 0; k < history.size(); ++k)
        CsvRow(os).cell(static_cast<long long>(k + 1)).cell(history[k]);
}

} // namespace fvmt
