#include <cmath>
#include <string>

#include "sprec/error.hpp"
#include "sprec/objective.hpp"

namespace sprec::serial {

namespace {

double regularization(const TrainingProblem& problem, std::span<const double> params) {
  double norm = 0.0;
  for (double v : params) norm += problem.spec().cost == Cost::L2 ? v * v : std::abs(v);
  return problem.spec().lambda * norm;
}

}  // namespace

double value(const TrainingProblem& problem, std::span<const double> params) {
  if (params.size() != problem.parameter_count()) {
    throw InvariantError("parameter vector size mismatch");
  }
  const auto ratings = problem.ratings();
  double total = 0.0;
  for (std::size_t idx = 0; idx < ratings.size(); ++idx) {
    const auto& r = ratings[idx];
    const double loss = pair_loss(problem.model(), problem.user_coords(params, r.user),
                                  problem.item_coords(params, r.item),
                                  problem.user_degrees()[r.user], problem.item_degrees()[r.item],
                                  problem.spec().cost, r.target);
    if (!std::isfinite(loss)) {
      throw NonFiniteError("non-finite objective term at rating " + std::to_string(idx), idx);
    }
    total += loss;
  }
  return total + regularization(problem, params);
}

double value_and_gradient(const TrainingProblem& problem, std::span<const double> params,
                          std::span<double> grad) {
  const double f = value(problem, params);
  const std::size_t dim = problem.dim();
  const std::size_t item_base = problem.n_users() * dim;
  const double lambda = problem.spec().lambda;
  const bool squared = problem.spec().cost == Cost::L2;
  for (std::size_t i = 0; i < params.size(); ++i) {
    grad[i] = squared ? 2.0 * lambda * params[i] : lambda * sign(params[i]);
  }
  std::vector<double> gx(dim);
  std::vector<double> gy(dim);
  for (const auto& r : problem.ratings()) {
    grad_pair(problem.model(), problem.user_coords(params, r.user),
              problem.item_coords(params, r.item), problem.user_degrees()[r.user],
              problem.item_degrees()[r.item], problem.spec().cost, r.target, gx, gy);
    for (std::size_t k = 0; k < dim; ++k) {
      grad[r.user * dim + k] += gx[k];
      grad[item_base + r.item * dim + k] += gy[k];
    }
  }
  return f;
}

}  // namespace sprec::serial
