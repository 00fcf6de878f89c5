#include "sprec/models.hpp"

#include <algorithm>
#include <cctype>

#include "sprec/error.hpp"

namespace sprec {

ModelKind ModelKind::sphm1(double alpha) {
  if (!(alpha > 1.0) || !std::isfinite(alpha)) {
    throw InvariantError("SPHM1 requires alpha > 1");
  }
  return ModelKind(ModelVariant::SPHM1, alpha);
}

ModelKind ModelKind::parse(std::string_view name, double alpha) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "SPHM1") return sphm1(alpha);
  if (upper == "SPHM2") return sphm2();
  if (upper == "SPDP") return spdp();
  throw InvariantError("unknown model '" + std::string(name) + "' (expected SPHM1, SPHM2, SPDP)");
}

std::string ModelKind::name() const { return std::string(to_string(variant_)); }

std::string_view to_string(ModelVariant v) {
  switch (v) {
    case ModelVariant::SPHM1: return "SPHM1";
    case ModelVariant::SPHM2: return "SPHM2";
    case ModelVariant::SPDP: return "SPDP";
  }
  return "?";
}

std::string_view to_string(Cost c) { return c == Cost::L2 ? "L2" : "L1"; }

Cost parse_cost(std::string_view name) {
  if (name == "L2" || name == "l2") return Cost::L2;
  if (name == "L1" || name == "l1") return Cost::L1;
  throw InvariantError("unknown objective '" + std::string(name) + "' (expected L1 or L2)");
}

double squared_distance(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double diff = x[k] - y[k];
    s += diff * diff;
  }
  return s;
}

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * y[k];
  return s;
}

double sphm1_prob(std::span<const double> x, std::span<const double> y, double ku, double kv,
                  double alpha) {
  return std::pow(1.0 + squared_distance(x, y) / std::sqrt(ku * kv), -alpha);
}

double sphm2_prob(std::span<const double> x, std::span<const double> y, double ku, double kv) {
  return 1.0 / (1.0 + squared_distance(x, y) / std::sqrt(ku * kv));
}

double spdp_score(std::span<const double> x, std::span<const double> y, double ku, double kv) {
  return std::sqrt(ku * kv) * std::exp(std::min(dot(x, y), kMaxExponent));
}

double connection_score(const ModelKind& model, std::span<const double> x,
                        std::span<const double> y, double ku, double kv) {
  switch (model.variant()) {
    case ModelVariant::SPHM1: return sphm1_prob(x, y, ku, kv, model.alpha());
    case ModelVariant::SPHM2: return sphm2_prob(x, y, ku, kv);
    case ModelVariant::SPDP: return spdp_score(x, y, ku, kv);
  }
  return 0.0;
}

double pair_loss(const ModelKind& model, std::span<const double> x, std::span<const double> y,
                 double ku, double kv, Cost cost, double target) {
  const double residual = connection_score(model, x, y, ku, kv) - target;
  return cost == Cost::L2 ? residual * residual : std::abs(residual);
}

void grad_pair(const ModelKind& model, std::span<const double> x, std::span<const double> y,
               double ku, double kv, Cost cost, double target, std::span<double> gx,
               std::span<double> gy) {
  const double s = std::sqrt(ku * kv);
  const double p = connection_score(model, x, y, ku, kv);
  const double residual = p - target;
  // Cost factor: 2 (p - r) for squared error, sign(p - r) for absolute error.
  const double dloss = cost == Cost::L2 ? 2.0 * residual : static_cast<double>(sign(residual));
  if (model.is_sphm()) {
    const double base = 1.0 + squared_distance(x, y) / s;
    const double decay = model.variant() == ModelVariant::SPHM2
                             ? p * p
                             : std::pow(base, -model.alpha() - 1.0);
    const double c = -2.0 * model.alpha() / s * dloss * decay;
    for (std::size_t k = 0; k < x.size(); ++k) {
      gx[k] = c * (x[k] - y[k]);
      gy[k] = c * (y[k] - x[k]);
    }
  } else {
    const double c = dloss * p;
    for (std::size_t k = 0; k < x.size(); ++k) {
      gx[k] = c * y[k];
      gy[k] = c * x[k];
    }
  }
}

}  // namespace sprec
