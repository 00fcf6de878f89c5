#pragma once

#include <span>
#include <string_view>

namespace sprec {

/// Throw InvariantError on empty input or mismatched lengths.
double rmse(std::span<const double> predicted, std::span<const double> truth);
double mae(std::span<const double> predicted, std::span<const double> truth);

enum class Metric { RMSE, MAE };
std::string_view to_string(Metric m);
Metric parse_metric(std::string_view name);

}  // namespace sprec
