#pragma once

#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace sprec {

/// Evaluates f(x), writes grad f(x) into the second argument, returns f(x).
using ObjectiveFn = std::function<double(std::span<const double>, std::span<double>)>;

struct OptimizerConfig {
  int max_iterations = 500;
  /// Stop when the sup-norm of the gradient falls below this.
  double grad_tolerance = 1e-6;
  double sufficient_decrease = 0.1;
  double curvature = 0.9;
  /// Iterations between forced steepest-descent restarts; 0 means one per
  /// parameter.
  int restart_interval = 0;
  int max_line_search_evaluations = 40;
  /// Restart along -g whenever g.d > -descent_bound * |g|^2.
  double descent_bound = 1e-3;
  /// After a Wolfe point is found, try the secant minimizer between 0 and that
  /// point once and keep it if it is lower. Exact on quadratics.
  bool secant_refinement = true;
  /// Accept the derivative form of sufficient decrease when f(step) <= f(0).
  bool approximate_wolfe = true;

  void validate() const;
};

enum class OptimizerStatus { Converged, MaxIterations, LineSearchFailure };
std::string_view to_string(OptimizerStatus s);
OptimizerStatus parse_optimizer_status(std::string_view s);

struct OptimizationResult {
  std::vector<double> x;
  double value = 0.0;
  OptimizerStatus status = OptimizerStatus::MaxIterations;
  int iterations = 0;
  int evaluations = 0;
  double grad_sup_norm = 0.0;
  /// Objective at x0 followed by the value after every accepted step.
  std::vector<double> value_trace;
  /// g.d / |g|^2 for the direction used at every iteration.
  std::vector<double> descent_trace;
};

/// Nonlinear conjugate gradient with the Hager-Zhang update, truncated from
/// below, and a bracketing line search for the strong Wolfe conditions. When
/// the curvature condition cannot be met (nonsmooth objectives) the best
/// point with sufficient decrease is accepted. A failed line search restarts
/// once along steepest descent before giving up.
OptimizationResult minimize(const ObjectiveFn& f, std::vector<double> x0,
                            const OptimizerConfig& cfg = {});

}  // namespace sprec
