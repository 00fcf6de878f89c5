#pragma once

#include <cmath>
#include <span>
#include <string>
#include <string_view>

namespace sprec {

enum class ModelVariant { SPHM1, SPHM2, SPDP };

/// Which connection kernel is in force. SPHM1 carries its decay exponent;
/// SPHM2 behaves as SPHM1 with exponent 1 but stays a separate variant.
class ModelKind {
 public:
  static ModelKind sphm1(double alpha);
  static ModelKind sphm2() { return ModelKind(ModelVariant::SPHM2, 1.0); }
  static ModelKind spdp() { return ModelKind(ModelVariant::SPDP, 1.0); }
  /// "SPHM1" (requires alpha), "SPHM2", or "SPDP", case-insensitive.
  static ModelKind parse(std::string_view name, double alpha = 2.0);

  ModelVariant variant() const noexcept { return variant_; }
  double alpha() const noexcept { return alpha_; }
  bool is_sphm() const noexcept { return variant_ != ModelVariant::SPDP; }
  std::string name() const;

  friend bool operator==(const ModelKind&, const ModelKind&) = default;

 private:
  ModelKind(ModelVariant v, double alpha) : variant_(v), alpha_(alpha) {}
  ModelVariant variant_;
  double alpha_;
};

std::string_view to_string(ModelVariant v);

enum class Cost { L2, L1 };
std::string_view to_string(Cost c);
Cost parse_cost(std::string_view name);

/// Upper bound applied to the dot product before exponentiation.
inline constexpr double kMaxExponent = 50.0;

double squared_distance(std::span<const double> x, std::span<const double> y);
double dot(std::span<const double> x, std::span<const double> y);

/// (1 + d^2 / sqrt(ku kv))^-alpha.
double sphm1_prob(std::span<const double> x, std::span<const double> y, double ku, double kv,
                  double alpha);
double sphm2_prob(std::span<const double> x, std::span<const double> y, double ku, double kv);
/// sqrt(ku kv) exp(x . y); unbounded above.
double spdp_score(std::span<const double> x, std::span<const double> y, double ku, double kv);
double connection_score(const ModelKind& model, std::span<const double> x,
                        std::span<const double> y, double ku, double kv);

inline int sign(double v) { return (v > 0.0) - (v < 0.0); }

/// Per-rating contribution of one (user, item) term to the objective gradient,
/// without regularization. Writes d/dx into gx and d/dy into gy.
void grad_pair(const ModelKind& model, std::span<const double> x, std::span<const double> y,
               double ku, double kv, Cost cost, double target, std::span<double> gx,
               std::span<double> gy);

/// The scalar loss of one term: (p - target)^2 or |p - target|.
double pair_loss(const ModelKind& model, std::span<const double> x, std::span<const double> y,
                 double ku, double kv, Cost cost, double target);

}  // namespace sprec
