#pragma once

#include <utility>
#include <vector>

#include "sprec/dataset.hpp"
#include "sprec/models.hpp"

namespace sprec {

inline constexpr double kDefaultPMin = 0.01;
inline constexpr double kDefaultPMax = 0.99;

/// Affine map between the rating scale and [p_min, p_max].
class ScalingConfig {
 public:
  ScalingConfig(double p_min, double p_max, RatingScale scale);
  explicit ScalingConfig(RatingScale scale) : ScalingConfig(kDefaultPMin, kDefaultPMax, scale) {}

  double p_min() const noexcept { return p_min_; }
  double p_max() const noexcept { return p_max_; }
  double r_min() const noexcept { return scale_.min; }
  double r_max() const noexcept { return scale_.max; }
  RatingScale scale() const noexcept { return scale_; }

  friend bool operator==(const ScalingConfig&, const ScalingConfig&) = default;

 private:
  double p_min_;
  double p_max_;
  RatingScale scale_;
};

/// Rating to probability; throws InvariantError outside the scale.
double phi(double rating, const ScalingConfig& cfg);
/// Clamps p into [p_min, p_max] and inverts phi.
double phi_inverse(double p, const ScalingConfig& cfg);
/// Translation r - r_min + 1; throws when r < r_min.
double varphi(double rating, double r_min);

struct Degrees {
  std::vector<double> users;
  std::vector<double> items;
};

/// SPHM variants use varphi of the average rating, SPDP uses phi of it.
/// Nodes unobserved in ds take the degree of the global mean.
Degrees assign_degrees(const RatingsDataset& ds, const ModelKind& model, const ScalingConfig& cfg);

/// Degree of a node with the given average rating.
double degree_from_average(double average, const ModelKind& model, const ScalingConfig& cfg);
/// Inverse of degree_from_average.
double average_from_degree(double degree, const ModelKind& model, const ScalingConfig& cfg);

/// Throws InvariantError if a degree violates the model's range.
void validate_degree(double degree, const ModelKind& model, const ScalingConfig& cfg);

}  // namespace sprec
