#include "sprec/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sprec/error.hpp"

namespace sprec {

ScalingConfig::ScalingConfig(double p_min, double p_max, RatingScale scale)
    : p_min_(p_min), p_max_(p_max), scale_(scale) {
  if (!(0.0 < p_min_ && p_min_ < p_max_ && p_max_ < 1.0)) {
    throw InvariantError("probability bounds must satisfy 0 < p_min < p_max < 1");
  }
  if (!(scale_.min < scale_.max)) throw InvariantError("rating scale must satisfy r_min < r_max");
}

double phi(double rating, const ScalingConfig& cfg) {
  if (!(rating >= cfg.r_min() && rating <= cfg.r_max())) {
    throw InvariantError("rating " + std::to_string(rating) + " outside the rating scale");
  }
  return (rating - cfg.r_min()) / (cfg.r_max() - cfg.r_min()) * (cfg.p_max() - cfg.p_min()) +
         cfg.p_min();
}

double phi_inverse(double p, const ScalingConfig& cfg) {
  // NaN scores map to p_min.
  const double clamped = std::isnan(p) ? cfg.p_min() : std::clamp(p, cfg.p_min(), cfg.p_max());
  const double r = (clamped - cfg.p_min()) / (cfg.p_max() - cfg.p_min()) *
                       (cfg.r_max() - cfg.r_min()) +
                   cfg.r_min();
  return std::clamp(r, cfg.r_min(), cfg.r_max());
}

double varphi(double rating, double r_min) {
  if (!(rating >= r_min)) throw InvariantError("translation requires rating >= r_min");
  return rating - r_min + 1.0;
}

double degree_from_average(double average, const ModelKind& model, const ScalingConfig& cfg) {
  // A mean of in-scale values can land one ulp outside the scale.
  average = std::clamp(average, cfg.r_min(), cfg.r_max());
  return model.is_sphm() ? varphi(average, cfg.r_min()) : phi(average, cfg);
}

double average_from_degree(double degree, const ModelKind& model, const ScalingConfig& cfg) {
  return model.is_sphm() ? std::clamp(degree + cfg.r_min() - 1.0, cfg.r_min(), cfg.r_max())
                         : phi_inverse(degree, cfg);
}

void validate_degree(double degree, const ModelKind& model, const ScalingConfig& cfg) {
  if (!std::isfinite(degree)) throw InvariantError("degree must be finite");
  if (model.is_sphm()) {
    if (degree < 1.0) throw InvariantError("SPHM degrees must be >= 1");
  } else if (degree < cfg.p_min() || degree > cfg.p_max()) {
    throw InvariantError("SPDP degrees must lie in [p_min, p_max]");
  }
}

Degrees assign_degrees(const RatingsDataset& ds, const ModelKind& model, const ScalingConfig& cfg) {
  const double fallback = degree_from_average(ds.global_mean(), model, cfg);
  Degrees out;
  out.users.resize(ds.n_users());
  out.items.resize(ds.n_items());
  for (std::size_t i = 0; i < ds.n_users(); ++i) {
    out.users[i] = ds.user_observed(i) ? degree_from_average(ds.user_mean(i), model, cfg) : fallback;
  }
  for (std::size_t j = 0; j < ds.n_items(); ++j) {
    out.items[j] = ds.item_observed(j) ? degree_from_average(ds.item_mean(j), model, cfg) : fallback;
  }
  return out;
}

}  // namespace sprec
