#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hybridcover/contract.hpp"
#include "hybridcover/dists.hpp"
#include "hybridcover/numerics.hpp"
#include "hybridcover/objective.hpp"
#include "hybridcover/sample.hpp"

namespace hc {

struct OptimizerStep {
    std::string phase;  // "grid", "golden" or "simplex"
    std::vector<double> theta;
    double value = 0.0;
};

struct OptimizeOptions {
    int grid_points_1d = 64;
    int grid_points_per_dim = 16;  // dim >= 2
    // Stop once the bracket (1D) or simplex (dim >= 2) is narrower than this
    // fraction of the box width in every coordinate.
    double rel_tolerance = 1e-6;
    int max_iterations = 4000;
    bool keep_trace = false;
};

struct OptimizeResult {
    std::vector<double> theta;
    double value = 0.0;
    bool flat = false;  // objective constant on the coarse grid; theta is the box midpoint
    std::vector<double> grid_theta;
    double grid_value = 0.0;
    int evaluations = 0;
    std::vector<OptimizerStep> trace;
};

// Maximizes the objective over the box. 1D: coarse grid then golden section on
// the bracket around the best grid point. dim >= 2: coarse grid then
// Nelder-Mead restricted to the box. Ties go to the lexicographically lowest
// theta. Throws NumericalError listing every grid point with a non-finite value.
OptimizeResult optimize_theta(const ObjectiveFn& objective, const ThetaBox& box,
                              const OptimizeOptions& options = {});

enum class CalibrationMethod { OneStep, TwoStep };

const char* to_string(CalibrationMethod method);

struct CalibrationResult {
    CalibrationMethod method = CalibrationMethod::OneStep;
    std::vector<double> theta_hat;
    double objective_at_opt = 0.0;
    double premium_at_opt = 0.0;
    bool flat_objective = false;
    std::optional<FitResult> fit;
    OptimizeResult optimizer;
};

CalibrationResult one_step_calibrate(const LossSample& sample, const PayoffFamily& family,
                                     const MetricConfig& config, const OptimizeOptions& options = {});

// Fits the tail model on the joint sample, then maximizes the tail
// approximation averaged over cov. With a Fitted clamp source the payoff clamp
// is rebound to the fitted model.
CalibrationResult two_step_calibrate(const LossSample& joint, const CovariateSample& cov,
                                     const PayoffFamily& family, const MetricConfig& config,
                                     const FitOptions& fit_options = {},
                                     Phi1Form form = Phi1Form::WithPrefactor,
                                     const OptimizeOptions& options = {});

// Same with a model supplied by the caller instead of a fresh fit.
CalibrationResult two_step_calibrate_with_model(const LossSample& joint, const CovariateSample& cov,
                                                const TailLinkModel& fitted,
                                                const PayoffFamily& family,
                                                const MetricConfig& config,
                                                Phi1Form form = Phi1Form::WithPrefactor,
                                                const OptimizeOptions& options = {});

// Regular grid over the box with roughly `points` nodes in total: `points`
// nodes in 1D, round(points^(1/d)) per axis otherwise. Row-major, first
// coordinate slowest.
std::vector<std::vector<double>> theta_grid(const ThetaBox& box, std::size_t points);

// max_k |a_k - b_k|; NaN if either input holds a NaN.
double sup_distance(std::span<const double> a, std::span<const double> b);

struct LearningCurveOptions {
    std::size_t n_start = 250;
    std::size_t increment = 250;
    std::size_t grid_points = 256;
    FitOptions fit;
    Phi1Form form = Phi1Form::WithPrefactor;
};

struct LearningCurveRow {
    std::size_t n = 0;
    double error_one = 0.0;  // sup over the grid of |one-step(n) - reference|
    double error_two = 0.0;  // sup over the grid of |two-step(n) - reference|
    std::vector<double> fitted_params;  // link coefficients, then sigma for GPD
    std::vector<double> theta_one;      // grid argmax of each criterion
    std::vector<double> theta_two;
    double opt_one = 0.0;  // grid maximum of each criterion
    double opt_two = 0.0;
    double opt_ref = 0.0;
    bool fit_ok = true;
    std::string fit_message;
};

struct LearningCurve {
    std::vector<std::vector<double>> grid;
    std::vector<double> reference;  // full-sample one-step criterion on the grid
    std::vector<LearningCurveRow> rows;
};

// For n = n_start, n_start + increment, ... and finally n = rows of full: the
// one-step criterion on the first n rows, a tail fit on the same rows and the
// two-step criterion averaged over every covariate of full, both compared on
// the grid with the one-step criterion of the whole sample. The payoff family
// (including its clamp) stays fixed. A failed fit flags the row and the loop
// continues.
LearningCurve learning_curve(const LossSample& full, const PayoffFamily& family,
                             const MetricConfig& config, const LearningCurveOptions& options = {});

}  // namespace hc
