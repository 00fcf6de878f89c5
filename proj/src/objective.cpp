#include "sprec/objective.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "sprec/error.hpp"

namespace sprec {

namespace {

constexpr std::size_t kBlock = 4096;
constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

// Sums term(i) for i in [0, count). Deterministic mode sums fixed-size blocks
// and then the block totals in index order.
template <class Term>
double parallel_sum(std::size_t count, bool deterministic, Term&& term) {
  if (!deterministic) {
    double total = 0.0;
#pragma omp parallel for schedule(dynamic, 1024) reduction(+ : total)
    for (std::size_t i = 0; i < count; ++i) total += term(i);
    return total;
  }
  const std::size_t blocks = (count + kBlock - 1) / kBlock;
  std::vector<double> partial(blocks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t end = std::min(count, (b + 1) * kBlock);
    double s = 0.0;
    for (std::size_t i = b * kBlock; i < end; ++i) s += term(i);
    partial[b] = s;
  }
  double total = 0.0;
  for (double s : partial) total += s;
  return total;
}

void build_csr(std::size_t nodes, std::span<const ScaledRating> ratings, bool by_user,
               std::vector<std::size_t>& offsets, std::vector<std::uint32_t>& members) {
  offsets.assign(nodes + 1, 0);
  for (const auto& r : ratings) ++offsets[(by_user ? r.user : r.item) + 1];
  for (std::size_t v = 0; v < nodes; ++v) offsets[v + 1] += offsets[v];
  members.resize(ratings.size());
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  for (std::size_t idx = 0; idx < ratings.size(); ++idx) {
    const auto node = by_user ? ratings[idx].user : ratings[idx].item;
    members[cursor[node]++] = static_cast<std::uint32_t>(idx);
  }
}

}  // namespace

TrainingProblem::TrainingProblem(std::size_t n_users, std::size_t n_items, std::size_t dim,
                                 ModelKind model, ObjectiveSpec spec,
                                 std::vector<ScaledRating> ratings,
                                 std::vector<double> user_degrees,
                                 std::vector<double> item_degrees, bool deterministic)
    : n_users_(n_users),
      n_items_(n_items),
      dim_(dim),
      model_(model),
      spec_(spec),
      ratings_(std::move(ratings)),
      user_degrees_(std::move(user_degrees)),
      item_degrees_(std::move(item_degrees)),
      deterministic_(deterministic) {
  if (dim_ == 0) throw InvariantError("dimension must be at least 1");
  if (!(spec_.lambda >= 0.0) || !std::isfinite(spec_.lambda)) {
    throw InvariantError("regularization coefficient must be >= 0");
  }
  if (user_degrees_.size() != n_users_ || item_degrees_.size() != n_items_) {
    throw InvariantError("degree vectors must match node counts");
  }
  for (const auto& r : ratings_) {
    if (r.user >= n_users_ || r.item >= n_items_) {
      throw InvariantError("rating references a node outside the index space");
    }
  }
  user_sqrt_degree_.resize(n_users_);
  item_sqrt_degree_.resize(n_items_);
  for (std::size_t i = 0; i < n_users_; ++i) {
    if (!(user_degrees_[i] > 0.0)) throw InvariantError("degrees must be positive");
    user_sqrt_degree_[i] = std::sqrt(user_degrees_[i]);
  }
  for (std::size_t j = 0; j < n_items_; ++j) {
    if (!(item_degrees_[j] > 0.0)) throw InvariantError("degrees must be positive");
    item_sqrt_degree_[j] = std::sqrt(item_degrees_[j]);
  }
  build_csr(n_users_, ratings_, true, user_offsets_, user_ratings_);
  build_csr(n_items_, ratings_, false, item_offsets_, item_ratings_);
}

double TrainingProblem::score(std::span<const double> params, std::size_t rating_index) const {
  const auto& r = ratings_[rating_index];
  return connection_score(model_, user_coords(params, r.user), item_coords(params, r.item),
                          user_degrees_[r.user], item_degrees_[r.item]);
}

double TrainingProblem::data_terms(std::span<const double> params,
                                   std::vector<double>* coefficients) const {
  const auto variant = model_.variant();
  const double alpha = model_.alpha();
  const bool squared = spec_.cost == Cost::L2;
  const double* p = params.data();
  const std::size_t item_base = n_users_ * dim_;
  double* coef = coefficients ? coefficients->data() : nullptr;

  // Returns the loss of rating idx and stores d(loss)/d(coordinate factor).
  auto term = [&](std::size_t idx) {
    const auto& r = ratings_[idx];
    const double* x = p + r.user * dim_;
    const double* y = p + item_base + r.item * dim_;
    const double s = user_sqrt_degree_[r.user] * item_sqrt_degree_[r.item];
    double score;
    double decay = 0.0;
    if (variant == ModelVariant::SPDP) {
      double xy = 0.0;
      for (std::size_t k = 0; k < dim_; ++k) xy += x[k] * y[k];
      score = s * std::exp(std::min(xy, kMaxExponent));
    } else {
      double d2 = 0.0;
      for (std::size_t k = 0; k < dim_; ++k) {
        const double diff = x[k] - y[k];
        d2 += diff * diff;
      }
      const double base = 1.0 + d2 / s;
      if (variant == ModelVariant::SPHM2) {
        score = 1.0 / base;
        decay = score * score;
      } else {
        score = std::pow(base, -alpha);
        decay = score / base;
      }
    }
    const double residual = score - r.target;
    const double loss = squared ? residual * residual : std::abs(residual);
    if (coef) {
      const double dloss = squared ? 2.0 * residual : static_cast<double>(sign(residual));
      coef[idx] = variant == ModelVariant::SPDP ? dloss * score : -2.0 * alpha / s * dloss * decay;
    }
    return loss;
  };

  const double total = parallel_sum(ratings_.size(), deterministic_, term);
  if (!std::isfinite(total)) {
    for (std::size_t idx = 0; idx < ratings_.size(); ++idx) {
      if (!std::isfinite(term(idx))) {
        throw NonFiniteError("non-finite objective term at rating " + std::to_string(idx), idx);
      }
    }
    throw NonFiniteError("non-finite objective value", kNone);
  }
  return total;
}

double TrainingProblem::regularization(std::span<const double> params) const {
  if (spec_.lambda == 0.0) return 0.0;
  const bool squared = spec_.cost == Cost::L2;
  const double* p = params.data();
  const double norm = parallel_sum(params.size(), deterministic_, [&](std::size_t i) {
    return squared ? p[i] * p[i] : std::abs(p[i]);
  });
  return spec_.lambda * norm;
}

double TrainingProblem::value(std::span<const double> params) const {
  if (params.size() != parameter_count()) throw InvariantError("parameter vector size mismatch");
  return data_terms(params, nullptr) + regularization(params);
}

double TrainingProblem::value_and_gradient(std::span<const double> params,
                                           std::span<double> grad) const {
  if (params.size() != parameter_count() || grad.size() != parameter_count()) {
    throw InvariantError("parameter vector size mismatch");
  }
  std::vector<double> coef(ratings_.size());
  const double data = data_terms(params, &coef);
  const double reg = regularization(params);

  const bool spdp = model_.variant() == ModelVariant::SPDP;
  const bool squared = spec_.cost == Cost::L2;
  const double lambda = spec_.lambda;
  const std::size_t dim = dim_;
  const std::size_t item_base = n_users_ * dim_;
  const double* p = params.data();
  double* g = grad.data();

  auto reg_grad = [&](double v) {
    return squared ? 2.0 * lambda * v : lambda * static_cast<double>(sign(v));
  };

#pragma omp parallel for schedule(dynamic, 16)
  for (std::size_t i = 0; i < n_users_; ++i) {
    const double* x = p + i * dim;
    double* gx = g + i * dim;
    for (std::size_t k = 0; k < dim; ++k) gx[k] = 0.0;
    for (std::size_t e = user_offsets_[i]; e < user_offsets_[i + 1]; ++e) {
      const auto idx = user_ratings_[e];
      const double* y = p + item_base + ratings_[idx].item * dim;
      const double c = coef[idx];
      if (spdp) {
        for (std::size_t k = 0; k < dim; ++k) gx[k] += c * y[k];
      } else {
        for (std::size_t k = 0; k < dim; ++k) gx[k] += c * (x[k] - y[k]);
      }
    }
    for (std::size_t k = 0; k < dim; ++k) gx[k] += reg_grad(x[k]);
  }

#pragma omp parallel for schedule(dynamic, 16)
  for (std::size_t j = 0; j < n_items_; ++j) {
    const double* y = p + item_base + j * dim;
    double* gy = g + item_base + j * dim;
    for (std::size_t k = 0; k < dim; ++k) gy[k] = 0.0;
    for (std::size_t e = item_offsets_[j]; e < item_offsets_[j + 1]; ++e) {
      const auto idx = item_ratings_[e];
      const double* x = p + ratings_[idx].user * dim;
      const double c = coef[idx];
      if (spdp) {
        for (std::size_t k = 0; k < dim; ++k) gy[k] += c * x[k];
      } else {
        for (std::size_t k = 0; k < dim; ++k) gy[k] += c * (y[k] - x[k]);
      }
    }
    for (std::size_t k = 0; k < dim; ++k) gy[k] += reg_grad(y[k]);
  }
  return data + reg;
}

}  // namespace sprec
