#include <doctest.h>

#include <cmath>
#include <vector>

#include "sprec/error.hpp"
#include "sprec/optimizer.hpp"

using namespace sprec;
using V = std::vector<double>;

namespace {

double sphere(std::span<const double> x, std::span<double> g) {
  double f = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    f += x[i] * x[i];
    g[i] = 2 * x[i];
  }
  return f;
}

double rosenbrock(std::span<const double> x, std::span<double> g) {
  const double a = 1 - x[0], b = x[1] - x[0] * x[0];
  g[0] = -2 * a - 400 * x[0] * b;
  g[1] = 200 * b;
  return a * a + 100 * b * b;
}

bool monotone(const V& trace) {
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (trace[i] > trace[i - 1]) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("sphere converges quickly") {
  const auto r = minimize(sphere, {3, -1, 2, 0.5, -7});
  CHECK(r.status == OptimizerStatus::Converged);
  CHECK(r.value < 1e-12);
  CHECK(r.iterations <= 50);
  CHECK(monotone(r.value_trace));
}

TEST_CASE("rosenbrock from the classical start") {
  OptimizerConfig cfg;
  cfg.max_iterations = 2000;
  cfg.grad_tolerance = 1e-10;
  const auto r = minimize(rosenbrock, {-1.2, 1}, cfg);
  CHECK(std::abs(r.x[0] - 1) < 1e-6);
  CHECK(std::abs(r.x[1] - 1) < 1e-6);
  CHECK(monotone(r.value_trace));
  for (double s : r.descent_trace) CHECK(s <= -cfg.descent_bound);
}

TEST_CASE("secant refinement gives exact line minima on a quadratic") {
  // 20 log-spaced curvatures over two decades; plain CG with exact steps needs 25
  auto quad = [](std::span<const double> x, std::span<double> g) {
    double f = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double a = std::pow(100.0, static_cast<double>(i) / 19.0);
      f += 0.5 * a * x[i] * x[i] - x[i];
      g[i] = a * x[i] - 1;
    }
    return f;
  };
  OptimizerConfig cfg;
  cfg.grad_tolerance = 1e-9;
  cfg.restart_interval = 100;
  const auto exact = minimize(quad, V(20, 0.0), cfg);
  cfg.secant_refinement = false;
  const auto loose = minimize(quad, V(20, 0.0), cfg);
  CHECK(exact.status == OptimizerStatus::Converged);
  CHECK(exact.iterations <= 30);
  CHECK(exact.iterations < loose.iterations);
}

TEST_CASE("huge tolerance returns x0") {
  OptimizerConfig cfg;
  cfg.grad_tolerance = 1e9;
  const V x0{1, 2, 3};
  const auto r = minimize(sphere, x0, cfg);
  CHECK(r.status == OptimizerStatus::Converged);
  CHECK(r.x == x0);
  CHECK(r.iterations == 0);
}

TEST_CASE("nonsmooth objective keeps a monotone trace") {
  auto l1 = [](std::span<const double> x, std::span<double> g) {
    double f = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      f += std::abs(x[i] - 1.0 * static_cast<double>(i));
      g[i] = (x[i] > static_cast<double>(i)) - (x[i] < static_cast<double>(i));
    }
    return f;
  };
  const auto r = minimize(l1, {5, 5, 5, 5});
  CHECK(monotone(r.value_trace));
  CHECK(r.value < 20.0);
}

TEST_CASE("optimizer is deterministic and validates its config") {
  const auto a = minimize(rosenbrock, {-1.2, 1});
  const auto b = minimize(rosenbrock, {-1.2, 1});
  CHECK(a.x == b.x);
  CHECK(a.value_trace == b.value_trace);
  OptimizerConfig bad;
  bad.sufficient_decrease = 0.95;
  CHECK_THROWS_AS(minimize(sphere, {1}, bad), InvariantError);
  bad = {};
  bad.max_iterations = 0;
  CHECK_THROWS_AS(minimize(sphere, {1}, bad), InvariantError);
  CHECK_THROWS_AS(minimize([](std::span<const double>, std::span<double>) { return std::nan(""); }, {1}),
                  NonFiniteError);
}

TEST_CASE("status names") {
  for (auto s : {OptimizerStatus::Converged, OptimizerStatus::MaxIterations, OptimizerStatus::LineSearchFailure}) {
    CHECK(parse_optimizer_status(to_string(s)) == s);
  }
}
