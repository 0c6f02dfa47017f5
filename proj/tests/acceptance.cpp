// Acceptance suite: runs every prescribed criterion at its stated tolerance
// and prints one pass/fail line per criterion. Exit status is the number of
// failed criteria.

#include "fvmt/csv.hpp"
#include "fvmt/dual.hpp"
#include "fvmt/estimates.hpp"
#include "fvmt/harness.hpp"
#include "fvmt/mollifier.hpp"
#include "fvmt/weak_residual.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace fvmt;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int index, const char* name, bool ok, const std::string& detail) {
    std::printf("[C%d %s] %s: %s\n", index, ok ? "PASS" : "FAIL", name, detail.c_str());
    if (!ok) ++g_failures;
}

// Closed-form cell averages of exp(-pi^2 t) cos(pi x): the independent
// Fourier-mode oracle for the heat fixture.
double heat_exact_cell_average(double t, int i, const UniformGrid& g) {
    return std::exp(-M_PI * M_PI * t) *
           (std::sin(M_PI * g.x_right(i)) - std::sin(M_PI * g.x_left(i))) / (M_PI * g.dx);
}

SemiDiscreteProblem heat_problem(int n) {
    SemiDiscreteProblem p;
    p.coeffs = identity_coefficients();
    p.grid = UniformGrid(n);
    p.pressure = pressure_by_name("zero", 0.1);
    p.initial = project_cell_averages([](double x) { return std::cos(M_PI * x); }, p.grid);
    p.horizon = 0.1;
    return p;
}

SemiDiscreteProblem generic_problem(int n, double delta) {
    SemiDiscreteProblem p;
    p.coeffs = sinusoidal_coefficients();
    p.grid = UniformGrid(n);
    p.pressure = mollify(pressure_by_name("sine-product", 0.1), delta);
    p.initial = project_cell_averages([](double x) { return std::cos(M_PI * x); }, p.grid);
    p.horizon = 0.1;
    return p;
}

double spacetime_error_vs_exact(const SpaceTimeField& traj) {
    std::vector<double> err_sq(traj.times.size());
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        double sq = 0.0;
        for (int i = 0; i < traj.grid.n; ++i) {
            const double e =
                traj.frames[k][i] - heat_exact_cell_average(traj.times[k], i, traj.grid);
            sq += traj.grid.dx * e * e;
        }
        err_sq[k] = sq;
    }
    double acc = 0.0;
    for (std::size_t k = 1; k < traj.times.size(); ++k)
        acc += 0.5 * (err_sq[k] + err_sq[k - 1]) * (traj.times[k] - traj.times[k - 1]);
    return std::sqrt(acc);
}

void criterion1_heat_order() {
    bool ok = true;
    std::ostringstream detail;
    std::vector<double> errors;
    for (int n : {16, 32, 64, 128}) {
        SemiDiscreteProblem p = heat_problem(n);
        TimeStepConfig cfg;
        cfg.dt = 0.25 * p.grid.dx * p.grid.dx;
        errors.push_back(spacetime_error_vs_exact(solve(p, cfg).trajectory));
    }
    detail << "orders:";
    for (std::size_t k = 1; k < errors.size(); ++k) {
        const double order = std::log2(errors[k - 1] / errors[k]);
        detail << " " << format_double(order);
        if (!(order >= 1.7 && order <= 2.3)) ok = false;
    }
    report(1, "heat-equation oracle, spatial order in [1.7, 2.3]", ok, detail.str());
}

void criterion2_mass_conservation() {
    struct Fixture {
        const char* coeffs;
        const char* pressure;
        const char* initial;
        double delta;
    };
    const Fixture fixtures[] = {
        {"identity", "zero", "cosine", 0.0},
        {"sinusoidal", "sine-product", "cosine", 0.05},
        {"paper-generic", "rough", "bump", 0.05},
        {"identity", "constant", "bump", 0.1},
        {"sinusoidal", "sine-sine", "constant", 0.025},
    };
    bool ok = true;
    double worst = 0.0;
    for (const auto& f : fixtures) {
        ExperimentConfig cfg;
        cfg.coefficients = f.coeffs;
        cfg.pressure = f.pressure;
        cfg.initial = f.initial;
        cfg.horizon = 0.1;
        SemiDiscreteProblem p = make_problem(cfg, 64, f.delta);
        TimeStepConfig step = make_step_config(cfg, p.grid);
        SolveResult sol = solve(p, step);
        for (const auto& row : sol.runlog) worst = std::max(worst, std::abs(row.mass_drift));
    }
    ok = worst <= 1e-8;
    report(2, "mass conservation <= 1e-8 on every shipped fixture", ok,
           "max drift " + format_double(worst));
}

void criterion3_energy_budget() {
    bool ok = true;
    std::ostringstream detail;
    auto reversed = [](const SpaceTimeField& f) {
        SpaceTimeField out;
        out.grid = f.grid;
        out.times = f.times;
        out.frames.assign(f.frames.rbegin(), f.frames.rend());
        return out;
    };
    {
        SemiDiscreteProblem p = heat_problem(64);
        TimeStepConfig cfg;
        cfg.dt = 0.4 * p.grid.dx * p.grid.dx;
        SolveResult sol = solve(p, cfg);
        EstimateReport good = energy_budget(sol.trajectory, sol.pressure_cells, p.coeffs);
        EstimateReport bad =
            energy_budget(reversed(sol.trajectory), sol.pressure_cells, p.coeffs);
        if (!good.passed || bad.passed) ok = false;
        detail << "heat margin " << format_double(good.margin) << ", reversed margin "
               << format_double(bad.margin);
    }
    {
        SemiDiscreteProblem p = generic_problem(64, 0.05);
        TimeStepConfig cfg;
        cfg.dt = 0.4 * p.grid.dx * p.grid.dx;
        SolveResult sol = solve(p, cfg);
        EstimateReport good = energy_budget(sol.trajectory, sol.pressure_cells, p.coeffs);
        EstimateReport bad =
            energy_budget(reversed(sol.trajectory), sol.pressure_cells, p.coeffs);
        if (!good.passed || bad.passed) ok = false;
    }
    report(3, "energy budget passes on genuine runs, fails time-reversed", ok, detail.str());
}

struct SweepCell {
    double delta;
    int n;
    SolveResult sol;
};

void criteria45_uniform_bounds_and_theorem_shadow() {
    const std::vector<double> deltas = {0.1, 0.05, 0.025};
    const std::vector<int> levels = {32, 64, 128, 256};
    std::vector<SweepCell> sweep;
    for (double d : deltas)
        for (int n : levels) {
            SemiDiscreteProblem p = generic_problem(n, d);
            TimeStepConfig cfg;
            cfg.dt = 0.4 * p.grid.dx * p.grid.dx;
            sweep.push_back({d, n, solve(p, cfg)});
        }

    // Criterion 4: one C15 candidate, computed from the finest initial data,
    // bounds all four quantities of every cell in the sweep.
    {
        const CoefficientSet cs = sinusoidal_coefficients();
        const double p_l2 = pressure_spacetime_l2(pressure_by_name("sine-product", 0.1));
        bool ok = true;
        double min_margin = 1e300;
        for (const auto& cell : sweep) {
            auto reports = uniform_bounds(cell.sol.trajectory, cs, p_l2);
            for (const auto& r : reports) {
                min_margin = std::min(min_margin, r.margin);
                if (!r.passed || r.margin < 0.0) ok = false;
            }
        }
        report(4, "C15 candidate bounds all four quantities over the 3x4 sweep", ok,
               "min margin " + format_double(min_margin));
    }

    // Criterion 5: inner Cauchy differences strictly decreasing in n at each
    // delta; outer differences decreasing in delta at n = 256.
    {
        bool ok = true;
        std::ostringstream detail;
        for (double d : deltas) {
            std::vector<const SweepCell*> row;
            for (const auto& cell : sweep)
                if (cell.delta == d) row.push_back(&cell);
            std::vector<double> diffs;
            for (std::size_t i = 0; i + 1 < row.size(); ++i)
                diffs.push_back(spacetime_l2_distance(row[i]->sol.trajectory,
                                                      row[i + 1]->sol.trajectory));
            for (std::size_t i = 1; i < diffs.size(); ++i)
                if (!(diffs[i] < diffs[i - 1])) ok = false;
            detail << " inner[d=" << format_double(d) << "]:";
            for (double v : diffs) detail << " " << format_double(v);
        }
        std::vector<double> outer;
        for (std::size_t di = 0; di + 1 < deltas.size(); ++di) {
            const SweepCell *a = nullptr, *b = nullptr;
            for (const auto& cell : sweep) {
                if (cell.n == 256 && cell.delta == deltas[di]) a = &cell;
                if (cell.n == 256 && cell.delta == deltas[di + 1]) b = &cell;
            }
            outer.push_back(spacetime_l2_distance(a->sol.trajectory, b->sol.trajectory));
        }
        for (std::size_t i = 1; i < outer.size(); ++i)
            if (!(outer[i] < outer[i - 1])) ok = false;
        detail << " outer:";
        for (double v : outer) detail << " " << format_double(v);
        report(5, "convergence shadow: Cauchy differences decrease (inner and outer)", ok,
               detail.str());
    }
}

void criterion6_weak_residual_decay() {
    bool ok = true;
    std::ostringstream detail;
    ResidualSweepConfig cfg;
    cfg.levels = {16, 32, 64, 128};
    cfg.dt_constant = 0.4;
    cfg.k_max = 3;

    cfg.make_problem = [](int n) { return heat_problem(n); };
    ConvergenceTable heat = residual_sweep(cfg);
    detail << "heat ratios:";
    for (std::size_t i = 1; i < heat.rows.size(); ++i) {
        detail << " " << format_double(heat.rows[i].ratio);
        if (!(heat.rows[i].ratio >= 1.5)) ok = false;
    }

    cfg.make_problem = [](int n) { return generic_problem(n, 0.05); };
    ConvergenceTable gen = residual_sweep(cfg);
    detail << " generic ratios:";
    for (std::size_t i = 1; i < gen.rows.size(); ++i) {
        detail << " " << format_double(gen.rows[i].ratio);
        if (!(gen.rows[i].ratio >= 1.5)) ok = false;
    }

    cfg.levels = {16, 32};
    cfg.make_problem = [](int n) {
        SemiDiscreteProblem p;
        p.coeffs = sinusoidal_coefficients();
        p.grid = UniformGrid(n);
        p.pressure = pressure_by_name("zero", 0.1);
        p.initial = GridFunction(p.grid, 1.1);
        p.horizon = 0.1;
        return p;
    };
    ConvergenceTable flat = residual_sweep(cfg);
    for (const auto& row : flat.rows)
        if (!(row.value <= 1e-8)) ok = false;

    report(6, "weak residual decays >= 1.5x per doubling, constant <= 1e-8", ok, detail.str());
}

void criterion7_dual_solver() {
    bool ok = true;
    std::ostringstream detail;

    // (a) Duhamel oracle at n = 128.
    {
        const double T = 0.2;
        const UniformGrid g(128);
        auto gfun = [T](double t) { return bump_profile((t - 0.5 * T) / (0.4 * T)) * M_E; };
        DualCoefficients d;
        d.sigma_eps = PressureField([](double, double) { return 1.0; }, T,
                                    Regularity::continuous, Extension::none);
        d.phi_eps = PressureField([](double, double) { return 0.0; }, T,
                                  Regularity::continuous, Extension::none);
        d.xi = PressureField(
            [gfun](double t, double x) { return std::cos(M_PI * x) * gfun(t); }, T,
            Regularity::continuous, Extension::none);
        d.horizon = T;
        d.delta_sigma = d.c_sigma = 1.0;
        d.c_q = 1.0;
        d.xi_sup = 1.0;

        const double dt = 1e-5;
        SpaceTimeField ztilde;
        ztilde.grid = g;
        const long m = static_cast<long>(std::ceil(T / dt - 1e-12));
        for (long k = 0; k <= m; ++k) {
            ztilde.times.push_back(k == m ? T : k * dt);
            ztilde.frames.emplace_back(g, 0.0);
        }
        SpaceTimeField z = solve_auxiliary(d, ztilde, g, dt);
        double worst = 0.0;
        for (int probe = 1; probe <= 20; ++probe) {
            const std::size_t k = probe * (z.times.size() - 1) / 20;
            const double t = z.times[k];
            double amp = 0.0;
            if (t > 0.0) {
                const int mm = 4000;
                auto f = [&](double s) { return std::exp(-M_PI * M_PI * (t - s)) * gfun(s); };
                amp = f(0.0) + f(t);
                for (int i = 1; i < mm; ++i) amp += (i % 2 ? 4.0 : 2.0) * f(t * i / mm);
                amp *= (t / mm) / 3.0;
            }
            for (int i = 0; i < g.n; ++i)
                worst = std::max(worst,
                                 std::abs(z.frames[k][i] - amp * std::cos(M_PI * g.x_center(i))));
        }
        detail << "duhamel err " << format_double(worst);
        if (!(worst <= 1e-4)) ok = false;
    }

    // (b)-(d): Picard contraction, maximum bound, H1 sweep.
    {
        const UniformGrid g(64);
        std::vector<DualState> states;
        bool contraction_seen = false;
        for (double eps : {0.1, 0.05, 0.025}) {
            DualCoefficients d = make_generic_dual_fixture(eps);
            DualState st = picard_solve(d, g, 2e-3, 1e-8, 50);
            st.epsilon = eps;
            if (st.picard_history.size() > 50) ok = false;
            for (std::size_t k = 1; k < st.picard_history.size(); ++k)
                if (st.picard_history[k] < 0.5 * st.picard_history[k - 1])
                    contraction_seen = true;
            EstimateReport max_bound = check_maximum_bound(st, d.xi_sup);
            if (!max_bound.passed) ok = false;
            states.push_back(std::move(st));
        }
        if (!contraction_seen) ok = false;
        detail << ", picard iters " << states[0].picard_history.size();
        auto h1 = check_h1_bounds(states, 0.7);
        if (!all_passed(h1)) ok = false;
        detail << ", h1 variation " << format_double(h1.back().lhs);
    }
    report(7, "dual solver: Duhamel 1e-4, Picard < 50 iters ratio < 0.5, |zeta| <= Mt, eps sweep < 2x",
           ok, detail.str());
}

void criterion8_inequality_suites() {
    bool ok = true;
    std::ostringstream detail;

    // Gagliardo-Nirenberg on 1000 random piecewise linears.
    {
        std::mt19937_64 rng(7771);
        std::uniform_real_distribution<double> dist(-3.0, 3.0);
        int passed = 0;
        for (int trial = 0; trial < 1000; ++trial) {
            PiecewiseLinear u;
            u.knot_values.resize(33);
            for (auto& v : u.knot_values) v = dist(rng);
            if (gn_inequality_check(u).passed) ++passed;
        }
        detail << "gn " << passed << "/1000";
        if (passed != 1000) ok = false;
    }

    // h-inequality chain on 1e4 samples for every shipped coefficient set.
    {
        std::vector<double> samples(10000);
        for (std::size_t i = 0; i < samples.size(); ++i)
            samples[i] = -50.0 + 100.0 * static_cast<double>(i) / (samples.size() - 1);
        for (const char* name : {"identity", "sinusoidal", "paper-generic"}) {
            auto reports = check_hhat_inequalities(coefficients_by_name(name), samples);
            if (!all_passed(reports)) ok = false;
        }
        detail << ", h-chain 3 sets x 1e4 samples";
    }

    // Mollifier L2 non-expansiveness and delta convergence.
    {
        const double T = 1.0;
        auto grid_l2 = [T](const PressureField& f) {
            const int mt = 160, mx = 160;
            double acc = 0.0;
            for (int a = 0; a < mt; ++a)
                for (int b = 0; b < mx; ++b) {
                    const double t = T * (a + 0.5) / mt, x = (b + 0.5) / mx;
                    acc += f(t, x) * f(t, x);
                }
            return std::sqrt(acc * (T / mt) / mx);
        };
        auto diff_l2 = [T](const PressureField& a, const PressureField& b) {
            const int mt = 120, mx = 120;
            double acc = 0.0;
            for (int i = 0; i < mt; ++i)
                for (int j = 0; j < mx; ++j) {
                    const double t = T * (i + 0.5) / mt, x = (j + 0.5) / mx;
                    const double d = a(t, x) - b(t, x);
                    acc += d * d;
                }
            return std::sqrt(acc * (T / mt) / mx);
        };
        for (const char* name : {"constant", "sine-product", "sine-sine", "rough"}) {
            const PressureField p = pressure_by_name(name, T);
            if (!(grid_l2(mollify(p, 0.05)) <= grid_l2(p) + 1e-6)) ok = false;
        }
        const PressureField lip = pressure_by_name("sine-sine", T);
        std::vector<double> errs;
        for (double delta : {0.1, 0.05, 0.025, 0.0125})
            errs.push_back(diff_l2(mollify(lip, delta), lip));
        for (std::size_t k = 1; k < errs.size(); ++k)
            if (!(errs[k] <= 1.05 * errs[k - 1])) ok = false;
        if (!(errs.back() < 1e-2)) ok = false;
        detail << ", mollifier err(finest delta) " << format_double(errs.back());
    }
    report(8, "inequality suites: GN, h-chain, mollifier properties", ok, detail.str());
}

void criterion9_determinism() {
    const fs::path base = fs::temp_directory_path() / "fvmt_acceptance_det";
    fs::remove_all(base);
    ExperimentConfig cfg;
    cfg.horizon = 0.05;
    cfg.grid_levels = {8, 16, 32};
    cfg.delta_levels = {0.1, 0.05};
    cfg.gn_samples = 50;
    cfg.out_dir = (base / "a").string();
    PipelineResult r1 = run_full_pipeline(cfg);
    cfg.out_dir = (base / "b").string();
    PipelineResult r2 = run_full_pipeline(cfg);
    auto slurp = [](const fs::path& p) {
        std::ifstream is(p, std::ios::binary);
        std::ostringstream os;
        os << is.rdbuf();
        return os.str();
    };
    bool ok = r1.exit_status == 0 && r2.exit_status == 0;
    int compared = 0;
    for (const char* name : {"trajectory.csv", "runlog.csv", "estimates.csv", "residuals.csv",
                             "convergence.csv", "dual_iters.csv"}) {
        if (!fs::exists(base / "a" / name) || !fs::exists(base / "b" / name)) {
            ok = false;
            continue;
        }
        ++compared;
        if (slurp(base / "a" / name) != slurp(base / "b" / name)) ok = false;
    }
    fs::remove_all(base);
    report(9, "byte-identical CSVs across two identical pipeline runs", ok,
           std::to_string(compared) + " files compared");
}

} // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    criterion1_heat_order();
    criterion2_mass_conservation();
    criterion3_energy_budget();
    criteria45_uniform_bounds_and_theorem_shadow();
    criterion6_weak_residual_decay();
    criterion7_dual_solver();
    criterion8_inequality_suites();
    criterion9_determinism();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("acceptance: %d criteria failed, %.1f s total\n", g_failures, secs);
    return g_failures;
}
