// Serial reference vs OpenMP kernels. Thread count comes from OMP_NUM_THREADS.
#include <benchmark/benchmark.h>

#include <vector>

#include "sprec/netgen.hpp"
#include "sprec/objective.hpp"
#include "sprec/random.hpp"

namespace {

using namespace sprec;

// roughly the shape of a MovieLens-100K training fold
TrainingProblem make_problem(Cost cost, bool deterministic) {
  constexpr std::size_t n = 943, m = 1682, count = 80000, dim = 10;
  Rng rng(0, "bench-problem");
  std::vector<ScaledRating> ratings;
  ratings.reserve(count);
  for (std::size_t r = 0; r < count; ++r) {
    ratings.push_back({static_cast<std::uint32_t>(rng.below(n)), static_cast<std::uint32_t>(rng.below(m)),
                       rng.uniform(0.01, 0.99)});
  }
  std::vector<double> ku(n), kv(m);
  for (auto& k : ku) k = rng.uniform(1, 5);
  for (auto& k : kv) k = rng.uniform(1, 5);
  return TrainingProblem(n, m, dim, ModelKind::sphm2(), {cost, 0.01}, std::move(ratings), std::move(ku),
                         std::move(kv), deterministic);
}

std::vector<double> params_for(const TrainingProblem& p) {
  Rng rng(1, "bench-params");
  std::vector<double> x(p.parameter_count());
  for (auto& v : x) v = rng.uniform(-0.5, 0.5);
  return x;
}

void BM_gradient_serial(benchmark::State& state) {
  const auto prob = make_problem(Cost::L2, true);
  const auto x = params_for(prob);
  std::vector<double> g(x.size());
  for (auto _ : state) benchmark::DoNotOptimize(serial::value_and_gradient(prob, x, g));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(prob.ratings().size()));
}

void BM_gradient_openmp(benchmark::State& state) {
  const auto prob = make_problem(Cost::L2, state.range(0) != 0);
  const auto x = params_for(prob);
  std::vector<double> g(x.size());
  for (auto _ : state) benchmark::DoNotOptimize(prob.value_and_gradient(x, g));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(prob.ratings().size()));
}

void BM_netgen_serial(benchmark::State& state) {
  NetGenConfig cfg;
  cfg.nodes = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(serial::generate(cfg).edges.size());
}

void BM_netgen_openmp(benchmark::State& state) {
  NetGenConfig cfg;
  cfg.nodes = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(generate(cfg).edges.size());
}

}  // namespace

BENCHMARK(BM_gradient_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_gradient_openmp)->ArgName("deterministic")->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_netgen_serial)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_netgen_openmp)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
