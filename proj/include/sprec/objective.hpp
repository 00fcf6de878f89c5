#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sprec/models.hpp"

namespace sprec {

struct ObjectiveSpec {
  Cost cost = Cost::L2;
  double lambda = 0.01;

  friend bool operator==(const ObjectiveSpec&, const ObjectiveSpec&) = default;
};

/// A rating already mapped into [p_min, p_max].
struct ScaledRating {
  std::uint32_t user;
  std::uint32_t item;
  double target;
};

/// Fitting problem over a flat parameter vector of length (n + m) * dim:
/// user i's coordinate k lives at i * dim + k, item j's at n * dim + j * dim + k.
///
/// The OpenMP evaluation computes one coefficient per rating, then gathers
/// contributions per user and per item over CSR adjacency in a fixed order,
/// so the gradient does not depend on the thread count. With `deterministic`
/// set the value is also reduced over fixed blocks in a fixed order.
class TrainingProblem {
 public:
  TrainingProblem(std::size_t n_users, std::size_t n_items, std::size_t dim, ModelKind model,
                  ObjectiveSpec spec, std::vector<ScaledRating> ratings,
                  std::vector<double> user_degrees, std::vector<double> item_degrees,
                  bool deterministic = true);

  std::size_t n_users() const noexcept { return n_users_; }
  std::size_t n_items() const noexcept { return n_items_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t parameter_count() const noexcept { return (n_users_ + n_items_) * dim_; }
  const ModelKind& model() const noexcept { return model_; }
  const ObjectiveSpec& spec() const noexcept { return spec_; }
  std::span<const ScaledRating> ratings() const noexcept { return ratings_; }
  std::span<const double> user_degrees() const noexcept { return user_degrees_; }
  std::span<const double> item_degrees() const noexcept { return item_degrees_; }
  bool deterministic() const noexcept { return deterministic_; }

  std::span<const double> user_coords(std::span<const double> params, std::size_t i) const {
    return params.subspan(i * dim_, dim_);
  }
  std::span<const double> item_coords(std::span<const double> params, std::size_t j) const {
    return params.subspan((n_users_ + j) * dim_, dim_);
  }

  double value(std::span<const double> params) const;
  /// Writes the gradient into grad (same layout as params) and returns the value.
  double value_and_gradient(std::span<const double> params, std::span<double> grad) const;

  /// Connection score p_ij of one rating under params.
  double score(std::span<const double> params, std::size_t rating_index) const;

 private:
  double data_terms(std::span<const double> params, std::vector<double>* coefficients) const;
  double regularization(std::span<const double> params) const;

  std::size_t n_users_;
  std::size_t n_items_;
  std::size_t dim_;
  ModelKind model_;
  ObjectiveSpec spec_;
  std::vector<ScaledRating> ratings_;
  std::vector<double> user_degrees_;
  std::vector<double> item_degrees_;
  std::vector<double> user_sqrt_degree_;
  std::vector<double> item_sqrt_degree_;
  // CSR adjacency: rating indices grouped by user and by item.
  std::vector<std::size_t> user_offsets_;
  std::vector<std::uint32_t> user_ratings_;
  std::vector<std::size_t> item_offsets_;
  std::vector<std::uint32_t> item_ratings_;
  bool deterministic_;
};

/// Single-threaded reference evaluation: one pass over ratings using the
/// per-pair kernels, scattering directly into the gradient.
namespace serial {
double value(const TrainingProblem& problem, std::span<const double> params);
double value_and_gradient(const TrainingProblem& problem, std::span<const double> params,
                          std::span<double> grad);
}  // namespace serial

}  // namespace sprec
