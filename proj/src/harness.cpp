#include "fvmt/harness.hpp"

#include "fvmt/csv.hpp"
#include "fvmt/estimates.hpp"
#include "fvmt/kernels.hpp"
#include "fvmt/mollifier.hpp"
#include "fvmt/quadrature.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <random>

namespace fvmt {

namespace fs = std::filesystem;

void ExperimentConfig::validate() const {
    if (horizon <= 0.0) throw std::invalid_argument("config: horizon must be positive");
    if (dt_constant <= 0.0) throw std::invalid_argument("config: dt_constant must be positive");
    if (grid_levels.empty()) throw std::invalid_argument("config: grid_levels empty");
    for (std::size_t i = 1; i < grid_levels.size(); ++i)
        if (grid_levels[i] <= grid_levels[i - 1])
            throw std::invalid_argument("config: grid_levels must increase");
    if (delta_levels.empty()) throw std::invalid_argument("config: delta_levels empty");
    for (double d : delta_levels)
        if (d <= 0.0) throw std::invalid_argument("config: delta levels must be positive");
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    if (j.contains("coefficients")) c.coefficients = j["coefficients"].get<std::string>();
    if (j.contains("pressure")) c.pressure = j["pressure"].get<std::string>();
    if (j.contains("initial")) c.initial = j["initial"].get<std::string>();
    if (j.contains("horizon")) c.horizon = j["horizon"].get<double>();
    if (j.contains("grid_levels")) c.grid_levels = j["grid_levels"].get<std::vector<int>>();
    if (j.contains("delta_levels"))
        c.delta_levels = j["delta_levels"].get<std::vector<double>>();
    if (j.contains("dt_constant")) c.dt_constant = j["dt_constant"].get<double>();
    if (j.contains("tolerances")) {
        const auto& t = j["tolerances"];
        if (t.contains("newton_tol")) c.newton_tol = t["newton_tol"].get<double>();
        if (t.contains("newton_max_iter")) c.newton_max_iter = t["newton_max_iter"].get<int>();
        if (t.contains("picard_tol")) c.picard_tol = t["picard_tol"].get<double>();
    }
    if (j.contains("mollifier")) {
        const auto& m = j["mollifier"];
        if (m.contains("mode")) c.mollifier_mode = m["mode"].get<std::string>();
        if (m.contains("quad_points")) c.mollifier_quad_points = m["quad_points"].get<int>();
    }
    if (j.contains("residual_k_max")) c.residual_k_max = j["residual_k_max"].get<int>();
    if (j.contains("run_dual")) c.run_dual = j["run_dual"].get<bool>();
    if (j.contains("gn_samples")) c.gn_samples = j["gn_samples"].get<int>();
    if (j.contains("out_dir")) c.out_dir = j["out_dir"].get<std::string>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::from_file(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config file " + path.string());
    nlohmann::json j;
    is >> j;
    return from_json(j);
}

nlohmann::json ExperimentConfig::to_json() const {
    return {
        {"coefficients", coefficients},
        {"pressure", pressure},
        {"initial", initial},
        {"horizon", horizon},
        {"grid_levels", grid_levels},
        {"delta_levels", delta_levels},
        {"dt_constant", dt_constant},
        {"tolerances",
         {{"newton_tol", newton_tol},
          {"newton_max_iter", newton_max_iter},
          {"picard_tol", picard_tol}}},
        {"mollifier", {{"mode", mollifier_mode}, {"quad_points", mollifier_quad_points}}},
        {"residual_k_max", residual_k_max},
        {"run_dual", run_dual},
        {"gn_samples", gn_samples},
        {"out_dir", out_dir},
        {"seed", seed},
    };
}

std::function<double(double)> initial_by_name(const std::string& name) {
    if (name == "zero") return [](double) { return 0.0; };
    if (name == "constant") return [](double) { return 1.0; };
    if (name == "cosine") return [](double x) { return std::cos(M_PI * x); };
    if (name == "bump") {
        return [](double x) {
            const double u = (x - 0.5) / 0.35;
            return bump_profile(u) * M_E; // normalized to 1 at the center
        };
    }
    throw std::invalid_argument("unknown initial-data fixture '" + name + "'");
}

MollifyMode mollify_mode_by_name(const std::string& name) {
    if (name == "tensor") return MollifyMode::tensor;
    if (name == "radial2d") return MollifyMode::radial2d;
    throw std::invalid_argument("unknown mollifier mode '" + name + "'");
}

double pressure_spacetime_l2(const PressureField& p) {
    const double T = p.horizon();
    auto split_integrate = [](const std::function<double(double)>& f, double a, double b,
                              const std::vector<double>& breaks) {
        std::vector<double> cuts{a, b};
        for (double c : breaks)
            if (c > a && c < b) cuts.push_back(c);
        std::sort(cuts.begin(), cuts.end());
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
            acc += adaptive_gauss(f, cuts[i], cuts[i + 1], 1e-12);
        return acc;
    };
    if (p.parts()) {
        const auto& parts = *p.parts();
        const double c0 = parts.offset;
        auto ft = parts.ft;
        auto fx = parts.fx;
        const double It = split_integrate(ft, 0.0, T, p.t_breaks());
        const double Ix = split_integrate(fx, 0.0, 1.0, p.x_breaks());
        const double It2 = split_integrate([&](double t) { return ft(t) * ft(t); }, 0.0, T,
                                           p.t_breaks());
        const double Ix2 = split_integrate([&](double x) { return fx(x) * fx(x); }, 0.0, 1.0,
                                           p.x_breaks());
        return std::sqrt(std::max(0.0, c0 * c0 * T + 2.0 * c0 * It * Ix + It2 * Ix2));
    }
    auto sq_at_t = [&](double t) {
        return split_integrate([&](double x) { return p(t, x) * p(t, x); }, 0.0, 1.0,
                               p.x_breaks());
    };
    return std::sqrt(split_integrate(sq_at_t, 0.0, T, p.t_breaks()));
}

SemiDiscreteProblem make_problem(const ExperimentConfig& cfg, int n, double delta) {
    SemiDiscreteProblem problem;
    problem.coeffs = coefficients_by_name(cfg.coefficients);
    problem.grid = UniformGrid(n);
    PressureField p = pressure_by_name(cfg.pressure, cfg.horizon);
    problem.pressure =
        delta > 0.0
            ? mollify(p, delta, cfg.mollifier_quad_points, mollify_mode_by_name(cfg.mollifier_mode))
            : p;
    problem.initial = project_cell_averages(initial_by_name(cfg.initial), problem.grid);
    problem.horizon = cfg.horizon;
    return problem;
}

TimeStepConfig make_step_config(const ExperimentConfig& cfg, const UniformGrid& grid) {
    TimeStepConfig step;
    step.dt = cfg.dt_constant * grid.dx * grid.dx;
    step.newton_tol = cfg.newton_tol;
    step.newton_max_iter = cfg.newton_max_iter;
    return step;
}

DualCoefficients make_generic_dual_fixture(double epsilon, double horizon) {
    const double T = horizon;
    PressureField sigma_base(
        [T](double t, double x) {
            return 1.0 + 0.3 * std::sin(2.0 * M_PI * x) * std::cos(M_PI * t / T);
        },
        T, Regularity::continuous, Extension::clamp);
    sigma_base.with_parts({1.0, [T](double t) { return std::cos(M_PI * t / T); },
                           [](double x) { return 0.3 * std::sin(2.0 * M_PI * x); }});

    DualCoefficients duals;
    duals.sigma_eps = mollify(sigma_base, epsilon, 32, MollifyMode::tensor);
    duals.phi_eps = PressureField([](double, double x) { return std::sin(M_PI * x); }, T,
                                  Regularity::continuous, Extension::none);
    // Tensor-product bump supported well inside the cylinder.
    duals.xi = PressureField(
        [T](double t, double x) {
            return 4.0 * bump_profile((t - 0.5 * T) / (0.4 * T)) * bump_profile((x - 0.5) / 0.4) *
                   M_E * M_E;
        },
        T, Regularity::continuous, Extension::zero);
    duals.horizon = T;
    duals.delta_sigma = 0.7;
    duals.c_sigma = 1.3;
    duals.c_q = 1.0;
    duals.xi_sup = 4.0;
    duals.phi_sup = 1.0;
    // Mollification with a unit-mass kernel cannot increase the Lipschitz
    // constants of the clamped base field.
    duals.sigma_dx_sup = 0.3 * 2.0 * M_PI;
    duals.sigma_dt_sup = 0.3 * M_PI / T;
    return duals;
}

namespace {

struct DeltaStudy {
    std::vector<ConvergenceRow> rows;
    SolveResult finest;
};

DeltaStudy study_one_delta(const ExperimentConfig& cfg, double delta, const StudyHooks* hooks) {
    DeltaStudy out;
    std::vector<SolveResult> solutions;
    solutions.reserve(cfg.grid_levels.size());
    for (int n : cfg.grid_levels) {
        SemiDiscreteProblem problem = make_problem(cfg, n, delta);
        solutions.push_back(solve(problem, make_step_config(cfg, problem.grid)));
    }

    auto dt_of = [&](std::size_t li) {
        const double dx = 1.0 / cfg.grid_levels[li];
        return cfg.dt_constant * dx * dx;
    };

    double prev = 0.0;
    for (std::size_t li = 0; li + 1 < solutions.size(); ++li) {
        const double d =
            spacetime_l2_distance(solutions[li].trajectory, solutions[li + 1].trajectory);
        ConvergenceRow row;
        row.label = "inner_cauchy";
        row.n = cfg.grid_levels[li];
        row.delta = delta;
        row.dt = dt_of(li);
        row.value = d;
        row.ratio = (li == 0 || d == 0.0) ? 0.0 : prev / d;
        prev = d;
        out.rows.push_back(row);
    }
    for (std::size_t li = 0; li + 1 < solutions.size(); ++li) {
        const double d =
            spacetime_l2_distance(solutions[li].trajectory, solutions.back().trajectory);
        ConvergenceRow row;
        row.label = "inner_vs_finest";
        row.n = cfg.grid_levels[li];
        row.delta = delta;
        row.dt = dt_of(li);
        row.value = d;
        row.ratio = 0.0;
        out.rows.push_back(row);
    }
    if (hooks && hooks->exact) {
        double prev_err = 0.0;
        for (std::size_t li = 0; li < solutions.size(); ++li) {
            const SpaceTimeField& traj = solutions[li].trajectory;
            std::vector<double> err_sq(traj.times.size());
            for (std::size_t k = 0; k < traj.times.size(); ++k) {
                const double t = traj.times[k];
                GridFunction ref = project_cell_averages(
                    [&](double x) { return hooks->exact(t, x); }, traj.grid);
                err_sq[k] = traj.grid.dx *
                            kernels::sum_sq_diff(traj.frames[k].data(), ref.data(), traj.grid.n);
            }
            double acc = 0.0;
            for (std::size_t k = 1; k < traj.times.size(); ++k)
                acc += 0.5 * (err_sq[k] + err_sq[k - 1]) * (traj.times[k] - traj.times[k - 1]);
            const double err = std::sqrt(acc);
            ConvergenceRow row;
            row.label = "exact_error";
            row.n = cfg.grid_levels[li];
            row.delta = delta;
            row.dt = dt_of(li);
            row.value = err;
            row.ratio = (li == 0 || err == 0.0) ? 0.0 : prev_err / err;
            prev_err = err;
            out.rows.push_back(row);
        }
    }
    out.finest = std::move(solutions.back());
    return out;
}

bool decreasing_with_slack(const std::vector<double>& seq, double slack_factor) {
    for (std::size_t i = 1; i < seq.size(); ++i)
        if (seq[i] > slack_factor * seq[i - 1]) return false;
    return true;
}

} // namespace

StudyResult run_refinement_study(const ExperimentConfig& cfg, const StudyHooks* hooks) {
    cfg.validate();
    StudyResult result;

    // Independent delta cells run concurrently; rows are merged in config
    // order so the output is scheduling-independent.
    std::vector<std::future<DeltaStudy>> futures;
    for (double delta : cfg.delta_levels)
        futures.push_back(std::async(std::launch::async, study_one_delta, std::cref(cfg), delta,
                                     hooks));
    std::vector<DeltaStudy> per_delta;
    per_delta.reserve(futures.size());
    for (auto& f : futures) per_delta.push_back(f.get());

    bool verdict = true;
    for (std::size_t di = 0; di < per_delta.size(); ++di) {
        std::vector<double> cauchy;
        for (const auto& row : per_delta[di].rows) {
            result.table.rows.push_back(row);
            if (row.label == "inner_cauchy") cauchy.push_back(row.value);
        }
        if (!decreasing_with_slack(cauchy, 1.1)) verdict = false;
    }

    // Outer study: consecutive-delta differences at the finest grid.
    std::vector<double> outer;
    double prev = 0.0;
    for (std::size_t di = 0; di + 1 < per_delta.size(); ++di) {
        const double d = spacetime_l2_distance(per_delta[di].finest.trajectory,
                                               per_delta[di + 1].finest.trajectory);
        ConvergenceRow row;
        row.label = "outer_delta";
        row.n = cfg.grid_levels.back();
        row.delta = cfg.delta_levels[di];
        row.dt = cfg.dt_constant / (cfg.grid_levels.back() * static_cast<double>(cfg.grid_levels.back()));
        row.value = d;
        row.ratio = (di == 0 || d == 0.0) ? 0.0 : prev / d;
        prev = d;
        result.table.rows.push_back(row);
        outer.push_back(d);
    }
    if (!decreasing_with_slack(outer, 1.1)) verdict = false;
    result.verdict = verdict;
    return result;
}

namespace {

SpaceTimeField time_reversed(const SpaceTimeField& traj) {
    SpaceTimeField out;
    out.grid = traj.grid;
    out.times = traj.times;
    out.frames.assign(traj.frames.rbegin(), traj.frames.rend());
    return out;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

PipelineResult run_full_pipeline(const ExperimentConfig& cfg, bool debug_adversarial) {
    cfg.validate();
    PipelineResult result;
    result.out_dir = fs::path(cfg.out_dir);
    fs::create_directories(result.out_dir);
    nlohmann::json timings;
    nlohmann::json stage_errors = nlohmann::json::array();
    const auto t_start = std::chrono::steady_clock::now();

    // Stage 1: refinement study.
    auto t0 = std::chrono::steady_clock::now();
    try {
        StudyResult study = run_refinement_study(cfg);
        result.study_verdict = study.verdict;
        std::ofstream os(result.out_dir / "convergence.csv", std::ios::binary);
        write_convergence_csv(study.table, os);
    } catch (const std::exception& e) {
        stage_errors.push_back({{"stage", "refine"}, {"error", e.what()}});
        result.stage_errors.push_back(std::string("refine: ") + e.what());
        result.study_verdict = false;
    }
    timings["refine"] = seconds_since(t0);

    // Stage 2: the reference solve at the finest grid, coarsest delta.
    t0 = std::chrono::steady_clock::now();
    const CoefficientSet coeffs = coefficients_by_name(cfg.coefficients);
    std::optional<SolveResult> sol;
    SemiDiscreteProblem problem;
    try {
        problem = make_problem(cfg, cfg.grid_levels.back(), cfg.delta_levels.front());
        sol = solve(problem, make_step_config(cfg, problem.grid));
        {
            std::ofstream os(result.out_dir / "trajectory.csv", std::ios::binary);
            write_csv(sol->trajectory, os);
        }
        {
            std::ofstream os(result.out_dir / "runlog.csv", std::ios::binary);
            write_runlog_csv(sol->runlog, os);
        }
    } catch (const std::exception& e) {
        stage_errors.push_back({{"stage", "solve"}, {"error", e.what()}});
        result.stage_errors.push_back(std::string("solve: ") + e.what());
    }
    timings["solve"] = seconds_since(t0);

    // Stage 3: estimate reports.
    t0 = std::chrono::steady_clock::now();
    try {
        auto assumption_reports = validate_assumptions(coeffs, {-50.0, 50.0}, 2001);
        result.reports.insert(result.reports.end(), assumption_reports.begin(),
                              assumption_reports.end());
        std::vector<double> sweep(2001);
        for (std::size_t i = 0; i < sweep.size(); ++i) sweep[i] = -50.0 + 0.05 * i;
        auto chain_reports = check_hhat_inequalities(coeffs, sweep);
        result.reports.insert(result.reports.end(), chain_reports.begin(), chain_reports.end());
    } catch (const std::exception& e) {
        stage_errors.push_back({{"stage", "coefficient-checks"}, {"error", e.what()}});
        result.stage_errors.push_back(std::string("coefficient-checks: ") + e.what());
    }
    if (sol) {
        try {
            const SpaceTimeField traj_for_energy =
                debug_adversarial ? time_reversed(sol->trajectory) : sol->trajectory;
            EstimateReport energy = energy_budget(traj_for_energy, sol->pressure_cells, coeffs);
            if (debug_adversarial) energy.name += "[adversarial]";
            result.reports.push_back(energy);

            const double p_l2 = pressure_spacetime_l2(pressure_by_name(cfg.pressure, cfg.horizon));
            auto bounds = uniform_bounds(sol->trajectory, coeffs, p_l2);
            result.reports.insert(result.reports.end(), bounds.begin(), bounds.end());

            const auto family = default_family(cfg.horizon, cfg.residual_k_max);
            result.reports.push_back(
                dual_norm_bound(sol->trajectory, sol->pressure_cells, coeffs, family, p_l2));
        } catch (const std::exception& e) {
            stage_errors.push_back({{"stage", "estimates"}, {"error", e.what()}});
            result.stage_errors.push_back(std::string("estimates: ") + e.what());
        }
    }
    timings["estimates"] = seconds_since(t0);

    // Stage 4: weak residuals of the reference solve.
    t0 = std::chrono::steady_clock::now();
    if (sol) {
        try {
            const auto family = default_family(cfg.horizon, cfg.residual_k_max);
            std::ofstream os(result.out_dir / "residuals.csv", std::ios::binary);
            os << "eta,residual\n";
            for (const auto& eta : family) {
                const double r =
                    residual(sol->trajectory, problem.pressure, coeffs, problem.initial, eta);
                CsvRow(os).cell(eta.label).cell(r);
            }
        } catch (const std::exception& e) {
            stage_errors.push_back({{"stage", "residual"}, {"error", e.what()}});
            result.stage_errors.push_back(std::string("residual: ") + e.what());
        }
    }
    timings["residual"] = seconds_since(t0);

    // Stage 5: dual machinery on the prescribed fixture.
    t0 = std::chrono::steady_clock::now();
    if (cfg.run_dual) {
        try {
            const UniformGrid dual_grid(64);
            const double dual_T = 0.5;
            const double dual_dt = 2e-3;
            std::vector<DualState> states;
            for (double eps : {0.1, 0.05, 0.025}) {
                DualCoefficients duals = make_generic_dual_fixture(eps, dual_T);
                DualState st = picard_solve(duals, dual_grid, dual_dt, cfg.picard_tol, 50);
                st.epsilon = eps;
                if (eps == 0.1) {
                    std::ofstream os(result.out_dir / "dual_iters.csv", std::ios::binary);
                    write_dual_iters_csv(st.picard_history, os);
                    result.reports.push_back(
                        check_maximum_bound(st, duals.xi_sup));
                }
                states.push_back(std::move(st));
            }
            auto h1 = check_h1_bounds(states, 0.7);
            result.reports.insert(result.reports.end(), h1.begin(), h1.end());
        } catch (const std::exception& e) {
            stage_errors.push_back({{"stage", "dual"}, {"error", e.what()}});
            result.stage_errors.push_back(std::string("dual: ") + e.what());
        }
    }
    timings["dual"] = seconds_since(t0);

    // Stage 6: random piecewise-linear Gagliardo-Nirenberg sweep.
    t0 = std::chrono::steady_clock::now();
    try {
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> dist(-2.0, 2.0);
        EstimateReport worst;
        bool have = false;
        for (int s = 0; s < cfg.gn_samples; ++s) {
            PiecewiseLinear pl;
            pl.knot_values.resize(33);
            for (auto& v : pl.knot_values) v = dist(rng);
            EstimateReport r = gn_inequality_check(pl);
            if (!have || r.margin < worst.margin) {
                worst = r;
                have = true;
            }
        }
        if (have) {
            worst.name = "gn_inequality_worst_of_" + std::to_string(cfg.gn_samples);
            result.reports.push_back(worst);
        }
    } catch (const std::exception& e) {
        stage_errors.push_back({{"stage", "gn"}, {"error", e.what()}});
        result.stage_errors.push_back(std::string("gn: ") + e.what());
    }
    timings["gn"] = seconds_since(t0);

    {
        std::ofstream os(result.out_dir / "estimates.csv", std::ios::binary);
        write_reports_csv(result.reports, os);
    }

    const bool reports_ok = all_passed(result.reports);
    result.exit_status = (reports_ok && result.study_verdict && stage_errors.empty()) ? 0 : 1;

    nlohmann::json manifest;
    manifest["config"] = cfg.to_json();
    manifest["version"] = "0.1.0";
    manifest["kernel_backend"] = kernels::backend_name(kernels::active_backend());
    manifest["timings"] = timings;
    manifest["timings"]["total"] = seconds_since(t_start);
    manifest["stage_errors"] = stage_errors;
    manifest["study_verdict"] = result.study_verdict;
    nlohmann::json rollup;
    rollup["total"] = result.reports.size();
    int failed = 0;
    nlohmann::json failed_names = nlohmann::json::array();
    for (const auto& r : result.reports)
        if (!r.passed) {
            ++failed;
            failed_names.push_back(r.name);
        }
    rollup["failed"] = failed;
    rollup["failed_names"] = failed_names;
    manifest["reports"] = rollup;
    manifest["report_details"] = nlohmann::json::parse(reports_to_json(result.reports));
    manifest["exit_status"] = result.exit_status;
    {
        std::ofstream os(result.out_dir / "manifest.json", std::ios::binary);
        os << manifest.dump(2) << "\n";
    }
    return result;
}

} // namespace fvmt
