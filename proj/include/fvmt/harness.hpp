#pragma once

#include "fvmt/coefficients.hpp"
#include "fvmt/dual.hpp"
#include "fvmt/field.hpp"
#include "fvmt/fvm.hpp"
#include "fvmt/mollifier.hpp"
#include "fvmt/report.hpp"
#include "fvmt/weak_residual.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace fvmt {

struct ExperimentConfig {
    std::string coefficients = "sinusoidal";
    std::string pressure = "sine-product";
    std::string initial = "cosine";
    double horizon = 0.1;
    std::vector<int> grid_levels = {16, 32, 64};
    std::vector<double> delta_levels = {0.1, 0.05};
    double dt_constant = 0.4; // dt = c * dx^2
    double newton_tol = 1e-10;
    int newton_max_iter = 50;
    double picard_tol = 1e-8;
    std::string mollifier_mode = "tensor"; // or "radial2d"
    int mollifier_quad_points = 32;
    int residual_k_max = 3;
    bool run_dual = true;
    int gn_samples = 100;
    std::string out_dir = "out";
    std::uint64_t seed = 12345;

    void validate() const;
    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig from_file(const std::filesystem::path& path);
    nlohmann::json to_json() const;
};

// Initial-data fixtures: "zero", "constant", "cosine", "bump".
std::function<double(double)> initial_by_name(const std::string& name);

MollifyMode mollify_mode_by_name(const std::string& name);

// |p|_{L2((0,T)x(0,1))}, exact factorization for separable fields.
double pressure_spacetime_l2(const PressureField& p);

// Assembles the semi-discrete problem for one (n, delta) study cell; delta
// <= 0 means the pressure is used unmollified.
SemiDiscreteProblem make_problem(const ExperimentConfig& cfg, int n, double delta);

TimeStepConfig make_step_config(const ExperimentConfig& cfg, const UniformGrid& grid);

// Analytic dual-problem fixture: mollified sinusoidal sigma, prescribed
// phi = sin(pi x), bump source. The declared bounds feed the contraction
// constants.
DualCoefficients make_generic_dual_fixture(double epsilon, double horizon = 0.5);

struct StudyHooks {
    // Optional exact reference solution; adds exact-error rows.
    std::function<double(double t, double x)> exact;
};

struct StudyResult {
    ConvergenceTable table;
    bool verdict = false; // every Cauchy sequence decreasing within 10% slack
};

// The (n, delta) double-limit study: inner Cauchy differences in n at each
// delta, outer differences in delta at the finest n.
StudyResult run_refinement_study(const ExperimentConfig& cfg,
                                 const StudyHooks* hooks = nullptr);

struct PipelineResult {
    int exit_status = 1;
    bool study_verdict = false;
    std::vector<EstimateReport> reports;
    std::vector<std::string> stage_errors;
    std::filesystem::path out_dir;
};

// solve -> estimates -> weak residual -> dual, with all CSV artifacts and a
// JSON manifest under cfg.out_dir. debug_adversarial feeds a time-reversed
// trajectory to the energy check, which must fail.
PipelineResult run_full_pipeline(const ExperimentConfig& cfg, bool debug_adversarial = false);

} // namespace fvmt
