#include "sprec/metrics.hpp"

#include <cmath>
#include <string>

#include "sprec/error.hpp"

namespace sprec {

namespace {

void check(std::span<const double> predicted, std::span<const double> truth) {
  if (predicted.size() != truth.size()) throw InvariantError("prediction/truth length mismatch");
  if (predicted.empty()) throw InvariantError("metrics need at least one prediction");
}

}  // namespace

double rmse(std::span<const double> predicted, std::span<const double> truth) {
  check(predicted, truth);
  double s = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double e = predicted[i] - truth[i];
    s += e * e;
  }
  return std::sqrt(s / static_cast<double>(predicted.size()));
}

double mae(std::span<const double> predicted, std::span<const double> truth) {
  check(predicted, truth);
  double s = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) s += std::abs(predicted[i] - truth[i]);
  return s / static_cast<double>(predicted.size());
}

std::string_view to_string(Metric m) { return m == Metric::RMSE ? "rmse" : "mae"; }

Metric parse_metric(std::string_view name) {
  if (name == "rmse" || name == "RMSE") return Metric::RMSE;
  if (name == "mae" || name == "MAE") return Metric::MAE;
  throw InvariantError("unknown metric '" + std::string(name) + "' (expected rmse or mae)");
}

}  // namespace sprec
