#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sprec/dataset.hpp"
#include "sprec/models.hpp"
#include "sprec/objective.hpp"
#include "sprec/optimizer.hpp"
#include "sprec/scaling.hpp"

namespace sprec {

struct TrainConfig {
  std::size_t dim = 10;
  double lambda = 0.01;
  Cost cost = Cost::L2;
  std::uint64_t seed = 0;
  double init_scale = 0.1;
  double p_min = kDefaultPMin;
  double p_max = kDefaultPMax;
  bool deterministic = true;
  OptimizerConfig optimizer;

  void validate() const;
  ObjectiveSpec objective() const { return {cost, lambda}; }
};

struct Provenance {
  std::uint64_t seed = 0;
  ObjectiveSpec objective;
  OptimizerStatus status = OptimizerStatus::MaxIterations;
  int iterations = 0;
  double initial_value = 0.0;
  double final_value = 0.0;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// Trained positions and degrees of every user and item.
struct Embedding {
  ModelKind model = ModelKind::sphm2();
  std::size_t dim = 0;
  std::vector<double> user_coords;  // n x dim, row-major
  std::vector<double> item_coords;  // m x dim, row-major
  std::vector<double> user_degrees;
  std::vector<double> item_degrees;
  std::vector<std::uint8_t> user_observed;
  std::vector<std::uint8_t> item_observed;
  ScalingConfig scaling{RatingScale{1.0, 5.0}};
  double global_mean = 0.0;
  Provenance provenance;

  std::size_t n_users() const noexcept { return user_degrees.size(); }
  std::size_t n_items() const noexcept { return item_degrees.size(); }
  std::span<const double> user(std::size_t i) const {
    return std::span<const double>(user_coords).subspan(i * dim, dim);
  }
  std::span<const double> item(std::size_t j) const {
    return std::span<const double>(item_coords).subspan(j * dim, dim);
  }

  /// Throws InvariantError on non-finite coordinates, bad degrees, or size
  /// mismatches.
  void validate() const;

  friend bool operator==(const Embedding&, const Embedding&) = default;
};

/// Builds the fitting problem for a training set: degrees from its averages,
/// targets from phi of each rating.
TrainingProblem make_problem(const RatingsDataset& train_set, const ModelKind& model,
                             const TrainConfig& cfg);

/// Seeded uniform initialization in [-init_scale, init_scale].
std::vector<double> initial_parameters(std::size_t count, const TrainConfig& cfg);

Embedding train(const RatingsDataset& train_set, const ModelKind& model, const TrainConfig& cfg);

enum class Fallback { None, ItemAverage, UserAverage, GlobalMean };
std::string_view to_string(Fallback f);

struct Prediction {
  double rating;
  Fallback fallback;
};

/// Users or items that are out of range or had no training rating are
/// unknown: an unknown user gets the item average, an unknown item the user
/// average, and an unknown pair the global mean.
Prediction predict(const Embedding& emb, std::optional<std::size_t> user,
                   std::optional<std::size_t> item);

inline constexpr std::string_view kModelMagic = "SPREC";
inline constexpr int kModelVersion = 1;

void save(const Embedding& emb, const std::filesystem::path& path);
Embedding load(const std::filesystem::path& path);

}  // namespace sprec
