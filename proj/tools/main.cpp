// Command-line front end: solve, refine, estimates, residual, dual, pipeline.

#include "fvmt/csv.hpp"
#include "fvmt/estimates.hpp"
#include "fvmt/harness.hpp"
#include "fvmt/kernels.hpp"
#include "fvmt/mollifier.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace fvmt;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir = "out";
    int level_cap = 1024;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

ExperimentConfig load_config(const CommonOpts& opts) {
    ExperimentConfig cfg;
    if (!opts.config_path.empty()) cfg = ExperimentConfig::from_file(opts.config_path);
    cfg.out_dir = opts.out_dir;
    if (opts.seed_set) cfg.seed = opts.seed;
    std::vector<int> capped;
    for (int n : cfg.grid_levels)
        if (n <= opts.level_cap) capped.push_back(n);
    if (capped.empty())
        throw std::runtime_error("--level-cap removed every grid level");
    cfg.grid_levels = capped;
    cfg.validate();
    return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "JSON experiment config");
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--level-cap", opts.level_cap, "drop grid levels above this cell count");
    cmd->add_option("--seed", opts.seed, "random seed override")
        ->each([&](const std::string&) { opts.seed_set = true; });
}

int cmd_solve(const CommonOpts& opts) {
    ExperimentConfig cfg = load_config(opts);
    fs::create_directories(cfg.out_dir);
    SemiDiscreteProblem problem = make_problem(cfg, cfg.grid_levels.back(), cfg.delta_levels.front());
    SolveResult sol = solve(problem, make_step_config(cfg, problem.grid));
    {
        std::ofstream os(fs::path(cfg.out_dir) / "trajectory.csv", std::ios::binary);
        write_csv(sol.trajectory, os);
    }
    {
        std::ofstream os(fs::path(cfg.out_dir) / "runlog.csv", std::ios::binary);
        write_runlog_csv(sol.runlog, os);
    }
    std::cout << "solved n=" << problem.grid.n << " steps=" << sol.runlog.size() - 1
              << " final mass drift=" << format_double(sol.runlog.back().mass_drift) << "\n";
    return 0;
}

int cmd_refine(const CommonOpts& opts) {
    ExperimentConfig cfg = load_config(opts);
    fs::create_directories(cfg.out_dir);
    StudyResult study = run_refinement_study(cfg);
    std::ofstream os(fs::path(cfg.out_dir) / "convergence.csv", std::ios::binary);
    write_convergence_csv(study.table, os);
    std::cout << "refinement study verdict: " << (study.verdict ? "pass" : "FAIL") << "\n";
    return study.verdict ? 0 : 1;
}

int cmd_estimates(const CommonOpts& opts) {
    ExperimentConfig cfg = load_config(opts);
    fs::create_directories(cfg.out_dir);
    const CoefficientSet coeffs = coefficients_by_name(cfg.coefficients);
    SemiDiscreteProblem problem = make_problem(cfg, cfg.grid_levels.back(), cfg.delta_levels.front());
    SolveResult sol = solve(problem, make_step_config(cfg, problem.grid));
    std::vector<EstimateReport> reports;
    reports.push_back(energy_budget(sol.trajectory, sol.pressure_cells, coeffs));
    const double p_l2 = pressure_spacetime_l2(pressure_by_name(cfg.pressure, cfg.horizon));
    auto bounds = uniform_bounds(sol.trajectory, coeffs, p_l2);
    reports.insert(reports.end(), bounds.begin(), bounds.end());
    reports.push_back(dual_norm_bound(sol.trajectory, sol.pressure_cells, coeffs,
                                      default_family(cfg.horizon, cfg.residual_k_max), p_l2));
    std::ofstream os(fs::path(cfg.out_dir) / "estimates.csv", std::ios::binary);
    write_reports_csv(reports, os);
    for (const auto& r : reports)
        std::cout << (r.passed ? "pass " : "FAIL ") << r.name << " margin="
                  << format_double(r.margin) << "\n";
    return all_passed(reports) ? 0 : 1;
}

int cmd_residual(const CommonOpts& opts) {
    ExperimentConfig cfg = load_config(opts);
    fs::create_directories(cfg.out_dir);
    SemiDiscreteProblem problem = make_problem(cfg, cfg.grid_levels.back(), cfg.delta_levels.front());
    SolveResult sol = solve(problem, make_step_config(cfg, problem.grid));
    const auto family = default_family(cfg.horizon, cfg.residual_k_max);
    std::ofstream os(fs::path(cfg.out_dir) / "residuals.csv", std::ios::binary);
    os << "eta,residual\n";
    double worst = 0.0;
    for (const auto& eta : family) {
        const double r = residual(sol.trajectory, problem.pressure, problem.coeffs,
                                  problem.initial, eta);
        worst = std::max(worst, std::abs(r));
        CsvRow(os).cell(eta.label).cell(r);
    }
    std::cout << "max family residual: " << format_double(worst) << "\n";
    return 0;
}

int cmd_dual(const CommonOpts& opts) {
    ExperimentConfig cfg = load_config(opts);
    fs::create_directories(cfg.out_dir);
    const UniformGrid grid(64);
    std::vector<DualState> states;
    std::vector<EstimateReport> reports;
    for (double eps : {0.1, 0.05, 0.025}) {
        DualCoefficients duals = make_generic_dual_fixture(eps);
        DualState st = picard_solve(duals, grid, 2e-3, cfg.picard_tol, 50);
        st.epsilon = eps;
        if (states.empty()) {
            std::ofstream os(fs::path(cfg.out_dir) / "dual_iters.csv", std::ios::binary);
            write_dual_iters_csv(st.picard_history, os);
            reports.push_back(check_maximum_bound(st, duals.xi_sup));
        }
        std::cout << "eps=" << format_double(eps) << " picard iterations "
                  << st.picard_history.size() << "\n";
        states.push_back(std::move(st));
    }
    auto h1 = check_h1_bounds(states, 0.7);
    reports.insert(reports.end(), h1.begin(), h1.end());
    std::ofstream os(fs::path(cfg.out_dir) / "estimates.csv", std::ios::binary);
    write_reports_csv(reports, os);
    return all_passed(reports) ? 0 : 1;
}

int cmd_pipeline(const CommonOpts& opts, bool adversarial) {
    ExperimentConfig cfg = load_config(opts);
    PipelineResult res = run_full_pipeline(cfg, adversarial);
    int failed = 0;
    for (const auto& r : res.reports)
        if (!r.passed) ++failed;
    std::cout << "pipeline: " << res.reports.size() - failed << "/" << res.reports.size()
              << " reports passed, study verdict " << (res.study_verdict ? "pass" : "FAIL")
              << ", artifacts in " << res.out_dir.string() << "\n";
    for (const auto& err : res.stage_errors) std::cout << "stage error: " << err << "\n";
    return res.exit_status;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-volume solver and verification harness for nonlinear moisture transport"};
    app.require_subcommand(1);

    CommonOpts opts;
    bool adversarial = false;

    auto* solve_cmd = app.add_subcommand("solve", "solve one (n, delta) cell, write trajectory");
    auto* refine_cmd = app.add_subcommand("refine", "run the (n, delta) refinement study");
    auto* estimates_cmd = app.add_subcommand("estimates", "solve and check the energy estimates");
    auto* residual_cmd = app.add_subcommand("residual", "solve and evaluate weak residuals");
    auto* dual_cmd = app.add_subcommand("dual", "run the dual-problem fixture and bounds");
    auto* pipeline_cmd = app.add_subcommand("pipeline", "full study + estimates + manifest");
    for (auto* cmd : {solve_cmd, refine_cmd, estimates_cmd, residual_cmd, dual_cmd, pipeline_cmd})
        add_common(cmd, opts);
    pipeline_cmd->add_flag("--debug-adversarial", adversarial,
                           "feed a time-reversed trajectory to the energy check (must fail)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve_cmd->parsed()) return cmd_solve(opts);
        if (refine_cmd->parsed()) return cmd_refine(opts);
        if (estimates_cmd->parsed()) return cmd_estimates(opts);
        if (residual_cmd->parsed()) return cmd_residual(opts);
        if (dual_cmd->parsed()) return cmd_dual(opts);
        if (pipeline_cmd->parsed()) return cmd_pipeline(opts, adversarial);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
