#include "sprec/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "sprec/error.hpp"

namespace sprec {

void OptimizerConfig::validate() const {
  if (max_iterations < 1) throw InvariantError("max_iterations must be >= 1");
  if (!(0.0 < sufficient_decrease && sufficient_decrease < curvature && curvature < 1.0)) {
    throw InvariantError("line search constants must satisfy 0 < c1 < c2 < 1");
  }
  if (!(grad_tolerance >= 0.0)) throw InvariantError("grad_tolerance must be >= 0");
  if (restart_interval < 0) throw InvariantError("restart_interval must be >= 0");
  if (max_line_search_evaluations < 1) throw InvariantError("line search budget must be >= 1");
  if (!(descent_bound > 0.0 && descent_bound < 1.0)) {
    throw InvariantError("descent_bound must lie in (0, 1)");
  }
}

std::string_view to_string(OptimizerStatus s) {
  switch (s) {
    case OptimizerStatus::Converged: return "converged";
    case OptimizerStatus::MaxIterations: return "max-iters";
    case OptimizerStatus::LineSearchFailure: return "line-search-failure";
  }
  return "?";
}

OptimizerStatus parse_optimizer_status(std::string_view s) {
  if (s == "converged") return OptimizerStatus::Converged;
  if (s == "max-iters") return OptimizerStatus::MaxIterations;
  if (s == "line-search-failure") return OptimizerStatus::LineSearchFailure;
  throw FormatError("unknown optimizer status '" + std::string(s) + "'");
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double sup_norm(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

struct Point {
  double step = 0.0;
  double f = 0.0;
  double slope = 0.0;  // directional derivative along d
};

class LineSearch {
 public:
  LineSearch(const ObjectiveFn& f, const OptimizerConfig& cfg, std::size_t n)
      : f_(f), cfg_(cfg), trial_x_(n), trial_g_(n), lo_g_(n) {}

  // On success x and g hold the accepted point and the new value is returned.
  // On failure x and g are untouched.
  std::optional<double> run(std::vector<double>& x, std::vector<double>& g,
                            std::span<const double> d, double f0, double slope0, double step0,
                            int& evaluations) {
    x0_ = &x;
    d_ = d;
    f0_ = f0;
    slope0_ = slope0;
    budget_ = cfg_.max_line_search_evaluations;

    Point prev{0.0, f0, slope0};
    lo_g_ = g;
    double step = step0;
    for (int i = 0;; ++i) {
      const Point cur = evaluate(step, evaluations);
      if (!armijo(cur) || (i > 0 && worse(cur, prev))) {
        return finish(zoom(prev, cur, evaluations), x, g, evaluations);
      }
      if (std::abs(cur.slope) <= -cfg_.curvature * slope0_) {
        lo_g_ = trial_g_;
        return finish(cur, x, g, evaluations);
      }
      if (cur.slope >= 0.0) {
        const Point hi = prev;
        lo_g_ = trial_g_;
        return finish(zoom(cur, hi, evaluations), x, g, evaluations);
      }
      prev = cur;
      lo_g_ = trial_g_;
      if (budget_ <= 0) return finish(prev, x, g, evaluations);
      step *= 3.0;
    }
  }

 private:
  bool sufficient_decrease(const Point& p) const {
    return p.f <= f0_ + cfg_.sufficient_decrease * p.step * slope0_;
  }

  // Hager-Zhang approximate Wolfe decrease: on a quadratic it is equivalent
  // to sufficient decrease, and it stays usable once value differences are
  // lost to rounding near a minimum.
  bool approximate_decrease(const Point& p) const {
    return cfg_.approximate_wolfe && std::isfinite(p.slope) &&
           p.slope <= (2.0 * cfg_.sufficient_decrease - 1.0) * slope0_;
  }

  bool tied(double a, double b) const { return std::abs(a - b) <= 1e-12 * std::abs(f0_); }

  // bracketing test: values within rounding are compared by slope instead
  bool armijo(const Point& p) const {
    return sufficient_decrease(p) || (tied(p.f, f0_) && approximate_decrease(p));
  }

  bool worse(const Point& p, const Point& ref) const {
    if (!tied(p.f, ref.f) || !cfg_.approximate_wolfe) return p.f >= ref.f;
    return !(p.slope < 0.0);
  }

  bool acceptable(const Point& p) const {
    if (!(p.step > 0.0)) return false;
    if (sufficient_decrease(p)) return true;
    return p.f <= f0_ && approximate_decrease(p) && p.slope >= cfg_.curvature * slope0_;
  }

  Point evaluate(double step, int& evaluations) {
    const auto& x = *x0_;
    for (std::size_t i = 0; i < x.size(); ++i) trial_x_[i] = x[i] + step * d_[i];
    double fx = f_(trial_x_, trial_g_);
    ++evaluations;
    --budget_;
    if (!std::isfinite(fx)) fx = std::numeric_limits<double>::infinity();
    const double slope = std::isfinite(fx) ? dot(trial_g_, d_) : std::numeric_limits<double>::quiet_NaN();
    return {step, fx, slope};
  }

  // lo satisfies sufficient decrease and has the lowest value seen; lo_g_
  // holds its gradient.
  Point zoom(Point lo, Point hi, int& evaluations) {
    while (budget_ > 0) {
      const double width = hi.step - lo.step;
      if (std::abs(width) <= 1e-16 * std::max(1.0, std::abs(lo.step))) break;
      double step = lo.step + 0.5 * width;
      if (std::isfinite(hi.f) && std::isfinite(hi.slope)) {
        const double d1 = lo.slope + hi.slope - 3.0 * (lo.f - hi.f) / (lo.step - hi.step);
        const double disc = d1 * d1 - lo.slope * hi.slope;
        if (disc >= 0.0) {
          const double d2 = std::copysign(std::sqrt(disc), hi.step - lo.step);
          const double cubic =
              hi.step - (hi.step - lo.step) * (hi.slope + d2 - d1) / (hi.slope - lo.slope + 2.0 * d2);
          const double a = std::min(lo.step, hi.step) + 0.1 * std::abs(width);
          const double b = std::max(lo.step, hi.step) - 0.1 * std::abs(width);
          if (std::isfinite(cubic) && cubic >= a && cubic <= b) step = cubic;
        }
      }
      const Point cur = evaluate(step, evaluations);
      if (!armijo(cur) || worse(cur, lo)) {
        hi = cur;
      } else {
        if (std::abs(cur.slope) <= -cfg_.curvature * slope0_) {
          lo_g_ = trial_g_;
          return cur;
        }
        if (cur.slope * (hi.step - lo.step) >= 0.0) hi = lo;
        lo = cur;
        lo_g_ = trial_g_;
      }
    }
    return lo;
  }

  std::optional<double> finish(Point p, std::vector<double>& x, std::vector<double>& g, int& evaluations) {
    if (!acceptable(p)) return std::nullopt;
    if (cfg_.secant_refinement && budget_ > 0 && std::isfinite(p.slope) && p.slope > slope0_ &&
        std::abs(p.slope) > 1e-6 * std::abs(slope0_)) {
      const double s = p.step * slope0_ / (slope0_ - p.slope);
      if (std::isfinite(s) && s > 0.0 && std::abs(s - p.step) > 1e-10 * p.step) {
        const Point q = evaluate(s, evaluations);
        if (acceptable(q) && q.f <= p.f && std::abs(q.slope) <= std::abs(p.slope)) {
          p = q;
          lo_g_ = trial_g_;
        }
      }
    }
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += p.step * d_[i];
    g = lo_g_;
    accepted_step_ = p.step;
    return p.f;
  }

 public:
  double accepted_step() const { return accepted_step_; }

 private:
  const ObjectiveFn& f_;
  const OptimizerConfig& cfg_;
  std::vector<double> trial_x_;
  std::vector<double> trial_g_;
  std::vector<double> lo_g_;
  std::vector<double>* x0_ = nullptr;
  std::span<const double> d_;
  double f0_ = 0.0;
  double slope0_ = 0.0;
  int budget_ = 0;
  double accepted_step_ = 0.0;
};

double first_step(std::span<const double> x, std::span<const double> g, double f) {
  const double gnorm = sup_norm(g);
  const double xnorm = sup_norm(x);
  if (xnorm > 0.0) return 0.01 * xnorm / gnorm;
  const double g2 = dot(g, g);
  if (f != 0.0) return 0.01 * std::abs(f) / g2;
  return 1.0;
}

}  // namespace

OptimizationResult minimize(const ObjectiveFn& f, std::vector<double> x0,
                            const OptimizerConfig& cfg) {
  cfg.validate();
  const std::size_t n = x0.size();
  OptimizationResult result;
  result.x = std::move(x0);
  auto& x = result.x;
  std::vector<double> g(n);
  double fx = f(x, g);
  result.evaluations = 1;
  if (!std::isfinite(fx)) {
    throw NonFiniteError("objective is not finite at the initial point",
                         std::numeric_limits<std::size_t>::max());
  }
  result.value_trace.push_back(fx);
  result.grad_sup_norm = sup_norm(g);
  result.value = fx;
  if (n == 0 || result.grad_sup_norm <= cfg.grad_tolerance) {
    result.status = OptimizerStatus::Converged;
    return result;
  }

  const int restart_every =
      cfg.restart_interval > 0 ? cfg.restart_interval : static_cast<int>(std::min<std::size_t>(n, 1u << 30));
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
  std::vector<double> g_old(n);
  LineSearch search(f, cfg, n);
  int since_restart = 0;
  double previous_step = 0.0;
  double previous_slope = 0.0;
  result.status = OptimizerStatus::MaxIterations;

  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    double g2 = dot(g, g);
    double slope = dot(g, d);
    result.descent_trace.push_back(slope / g2);

    double step = iter == 0 ? first_step(x, g, fx) : previous_step * previous_slope / slope;
    if (!std::isfinite(step) || step <= 0.0) step = first_step(x, g, fx);

    g_old = g;
    auto accepted = search.run(x, g, d, fx, slope, step, result.evaluations);
    if (!accepted && since_restart > 0) {
      // One steepest-descent retry before reporting failure.
      for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
      slope = -g2;
      result.descent_trace.back() = -1.0;
      since_restart = 0;
      accepted = search.run(x, g, d, fx, slope, first_step(x, g, fx), result.evaluations);
    }
    if (!accepted) {
      result.status = OptimizerStatus::LineSearchFailure;
      break;
    }
    fx = *accepted;
    previous_step = search.accepted_step();
    previous_slope = slope;
    result.value_trace.push_back(fx);
    result.iterations = iter + 1;
    result.grad_sup_norm = sup_norm(g);
    if (result.grad_sup_norm <= cfg.grad_tolerance) {
      result.status = OptimizerStatus::Converged;
      break;
    }

    // Hager-Zhang direction update.
    double dy = 0.0, yy = 0.0, yg = 0.0, dg = 0.0, dd = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double yi = g[i] - g_old[i];
      dy += d[i] * yi;
      yy += yi * yi;
      yg += yi * g[i];
      dg += d[i] * g[i];
      dd += d[i] * d[i];
    }
    ++since_restart;
    double beta = 0.0;
    if (since_restart < restart_every && dy > 0.0) {
      const double beta_hz = (yg - 2.0 * yy * dg / dy) / dy;
      const double eta = -1.0 / (std::sqrt(dd) * std::min(0.01, std::sqrt(g2)));
      beta = std::max(beta_hz, eta);
    } else {
      since_restart = 0;
    }
    const double g2_new = dot(g, g);
    double new_slope = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d[i] = -g[i] + beta * d[i];
      new_slope += g[i] * d[i];
    }
    if (!(new_slope <= -cfg.descent_bound * g2_new)) {
      for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
      since_restart = 0;
    }
  }
  result.value = fx;
  return result;
}

}  // namespace sprec
