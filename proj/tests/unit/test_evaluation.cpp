#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <vector>

#include "sprec/error.hpp"
#include "sprec/item_knn.hpp"
#include "sprec/metrics.hpp"
#include "sprec/protocol.hpp"
#include "sprec/random.hpp"
#include "sprec/rank.hpp"

using namespace sprec;
using V = std::vector<double>;

TEST_CASE("rmse and mae") {
  CHECK(mae(V{3, 4}, V{3, 5}) == doctest::Approx(0.5));
  CHECK(rmse(V{3, 4}, V{3, 5}) == doctest::Approx(std::sqrt(0.5)));
  CHECK(rmse(V{1, 2, 3}, V{1, 2, 3}) == 0.0);
  CHECK(mae(V{1, 2, 3}, V{1, 2, 3}) == 0.0);
  CHECK(mae(V{1.5, 2.5}, V{1, 2}) == doctest::Approx(0.5));
  CHECK(rmse(V{1.5, 2.5}, V{1, 2}) == doctest::Approx(0.5));
  CHECK_THROWS_AS(rmse(V{}, V{}), InvariantError);
  CHECK_THROWS_AS(mae(V{1}, V{1, 2}), InvariantError);
  Rng rng(1, "metrics");
  for (int t = 0; t < 100; ++t) {
    V a(10), b(10);
    for (auto& v : a) v = rng.uniform(1, 5);
    for (auto& v : b) v = rng.uniform(1, 5);
    CHECK(rmse(a, b) >= mae(a, b));
  }
}

namespace {

// Brute-force reference for the neighborhood predictor on a dense-ish matrix
// where NaN marks a missing rating.
double knn_oracle(const std::vector<V>& R, std::size_t u, std::size_t i, std::size_t k) {
  const std::size_t n = R.size(), m = R[0].size();
  auto pearson = [&](std::size_t a, std::size_t b) {
    V xa, xb;
    for (std::size_t w = 0; w < n; ++w) {
      if (!std::isnan(R[w][a]) && !std::isnan(R[w][b])) {
        xa.push_back(R[w][a]);
        xb.push_back(R[w][b]);
      }
    }
    if (xa.size() < 2) return std::nan("");
    double ma = 0, mb = 0;
    for (std::size_t t = 0; t < xa.size(); ++t) {
      ma += xa[t];
      mb += xb[t];
    }
    ma /= static_cast<double>(xa.size());
    mb /= static_cast<double>(xb.size());
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t t = 0; t < xa.size(); ++t) {
      sab += (xa[t] - ma) * (xb[t] - mb);
      saa += (xa[t] - ma) * (xa[t] - ma);
      sbb += (xb[t] - mb) * (xb[t] - mb);
    }
    if (saa == 0 || sbb == 0) return std::nan("");
    return sab / std::sqrt(saa * sbb);
  };
  std::vector<std::pair<double, std::size_t>> cand;
  for (std::size_t j = 0; j < m; ++j) {
    if (j == i || std::isnan(R[u][j])) continue;
    const double s = pearson(i, j);
    if (s > 0) cand.push_back({-s, j});
  }
  std::sort(cand.begin(), cand.end());
  if (cand.size() > k) cand.resize(k);
  double num = 0, den = 0;
  for (const auto& [negs, j] : cand) {
    num += -negs * R[u][j];
    den += -negs;
  }
  if (den == 0) {
    double s = 0, c = 0;
    for (double v : R[u]) {
      if (!std::isnan(v)) {
        s += v;
        ++c;
      }
    }
    return s / c;
  }
  return num / den;
}

RatingsDataset from_matrix(const std::vector<V>& R) {
  std::vector<Rating> r;
  for (std::size_t u = 0; u < R.size(); ++u) {
    for (std::size_t i = 0; i < R[u].size(); ++i) {
      if (!std::isnan(R[u][i])) r.push_back({static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(i), R[u][i]});
    }
  }
  return RatingsDataset(R.size(), R[0].size(), r, {1, 5});
}

}  // namespace

TEST_CASE("item knn on a 4x3 toy matrix matches the brute-force oracle") {
  const double x = std::nan("");
  const std::vector<V> R{{5, 3, 4}, {4, 2, x}, {1, 5, 2}, {2, 4, 1}};
  const auto ds = from_matrix(R);
  const ItemKnn knn(ds, 25);
  for (std::size_t u = 0; u < 4; ++u) {
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(knn.predict(u, i).rating == doctest::Approx(knn_oracle(R, u, i, 25)));
    }
  }
}

TEST_CASE("item knn on random matrices matches the oracle") {
  Rng rng(2, "knn-random");
  for (int t = 0; t < 20; ++t) {
    std::vector<V> R(12, V(9));
    for (auto& row : R) {
      for (auto& v : row) v = rng.uniform() < 0.6 ? 1.0 + static_cast<double>(rng.below(5)) : std::nan("");
      row[0] = 3;  // every user observed
    }
    const auto ds = from_matrix(R);
    for (std::size_t k : {1, 3, 25}) {
      const ItemKnn knn(ds, k);
      for (std::size_t u = 0; u < 12; ++u) {
        for (std::size_t i = 0; i < 9; ++i) {
          CHECK(knn.predict(u, i).rating == doctest::Approx(knn_oracle(R, u, i, k)));
        }
      }
    }
  }
}

TEST_CASE("item knn examples") {
  const double x = std::nan("");
  // item 1 is a copy of item 0 over the co-raters
  const std::vector<V> R{{1, 1, 4}, {3, 3, 2}, {5, 5, x}, {2, x, 5}};
  const ItemKnn knn(from_matrix(R), 1);
  CHECK(knn.similarity(0, 1) == doctest::Approx(1.0));
  CHECK(knn.predict(3, 1).rating == doctest::Approx(2.0));
  CHECK(knn.predict(3, 1).fallback == Fallback::None);

  // no co-rated items at all: user average
  const std::vector<V> S{{4, x}, {x, 2}};
  const ItemKnn lonely(from_matrix(S));
  CHECK(lonely.predict(0, 1).rating == doctest::Approx(4.0));
  CHECK(lonely.predict(std::nullopt, 1).fallback == Fallback::ItemAverage);
}

TEST_CASE("mean rank examples") {
  MetricTable t;
  t.set("d1", "A", 0.8);
  t.set("d1", "B", 0.9);
  t.set("d2", "A", 1.0);
  t.set("d2", "B", 1.1);
  auto r = mean_rank(t);
  CHECK(r.mean_rank == V{1.0, 2.0});

  t.set("d2", "B", 1.0);
  r = mean_rank(t);
  CHECK(r.ranks[1] == V{1.5, 1.5});
  CHECK(r.mean_rank == V{1.25, 1.75});

  t.set("d3", "A", 1.0);
  CHECK_THROWS_AS(mean_rank(t), DataError);
}

TEST_CASE("mean rank ignores monotone transforms and reads tables") {
  std::istringstream in("dataset,X,Y,Z\n# comment\nd1,0.9,0.8,0.95\nd2,1.2,1.1,1.1\n");
  const auto t = read_metric_table(in, "inline");
  CHECK(t.methods == std::vector<std::string>{"X", "Y", "Z"});
  const auto r = mean_rank(t);
  auto u = t;
  for (auto& row : u.values) {
    for (auto& v : row) v = std::exp(3 * v) + 1;
  }
  CHECK(mean_rank(u).mean_rank == r.mean_rank);
  CHECK(r.mean_rank == V{2.5, 1.25, 2.25});
  CHECK(format_rank_table(r).rfind("method,mean_rank,d1,d2\n", 0) == 0);
  std::istringstream tabs("dataset\tX\tY\nd1\t1\t2\n");
  CHECK(read_metric_table(tabs, "tabs").values[0] == V{1, 2});
}

namespace {

// 20 users and 10 items with planted positions on a circle; ratings fall
// off with distance.
RatingsDataset planted(std::uint64_t seed) {
  Rng rng(seed, "planted");
  std::vector<double> ua(20), ia(10);
  for (auto& a : ua) a = rng.uniform(0, 6.283);
  for (auto& a : ia) a = rng.uniform(0, 6.283);
  std::vector<Rating> r;
  for (std::uint32_t u = 0; u < 20; ++u) {
    for (std::uint32_t i = 0; i < 10; ++i) {
      const double d = 1 - std::cos(ua[u] - ia[i]);
      const double v = std::clamp(std::round(5 - 2 * d + rng.uniform(-0.3, 0.3)), 1.0, 5.0);
      r.push_back({u, i, v});
    }
  }
  return RatingsDataset(20, 10, r, {1, 5});
}

}  // namespace

TEST_CASE("cross validation beats the global mean on planted structure") {
  const auto ds = planted(3);
  const auto folds = make_folds(ds, 5, 4);
  GridSpec grid;
  grid.dims = {2};
  grid.lambdas = {0.01};
  TrainConfig base;
  const auto rep = run_cv(ds, ModelVariant::SPHM2, grid, folds, base);
  double baseline = 0;
  for (std::size_t f = 0; f < 5; ++f) {
    const auto train_idx = folds.train_indices(f);
    const double mu = ds.restrict(train_idx).global_mean();
    V p, t;
    for (auto i : folds.test_indices(f)) {
      p.push_back(mu);
      t.push_back(ds[i].value);
    }
    baseline += rmse(p, t) / 5;
  }
  CHECK(rep.mean_rmse < baseline);
  for (const auto& f : rep.folds) CHECK(f.test.rmse >= f.test.mae);
}

TEST_CASE("single-cell grid equals plain cross validation") {
  const auto ds = planted(5);
  const auto folds = make_folds(ds, 5, 6);
  GridSpec grid;
  grid.dims = {3};
  grid.lambdas = {0.1};
  TrainConfig base;
  const auto rep = run_cv(ds, ModelVariant::SPDP, grid, folds, base);
  for (std::size_t f = 0; f < 5; ++f) {
    auto cfg = base;
    cfg.dim = 3;
    cfg.lambda = 0.1;
    const auto emb = train(ds.restrict(folds.train_indices(f)), ModelKind::spdp(), cfg);
    CHECK(score(emb, ds, folds.test_indices(f)).rmse == rep.folds[f].test.rmse);
  }
}

TEST_CASE("duplicate grid cells select the same config and runs reproduce") {
  const auto ds = planted(7);
  const auto folds = make_folds(ds, 5, 8);
  GridSpec grid;
  grid.dims = {2, 4};
  grid.lambdas = {0.1, 0.01};
  grid.alphas = {2, 3};
  GridSpec dup = grid;
  dup.dims = {2, 4, 2};
  dup.alphas = {2, 3, 3};
  TrainConfig base;
  const auto a = run_cv(ds, ModelVariant::SPHM1, grid, folds, base);
  const auto b = run_cv(ds, ModelVariant::SPHM1, dup, folds, base);
  const auto c = run_cv(ds, ModelVariant::SPHM1, grid, folds, base);
  for (std::size_t f = 0; f < 5; ++f) {
    CHECK(a.folds[f].selected == b.folds[f].selected);
    CHECK(a.folds[f].selected == c.folds[f].selected);
    CHECK(a.folds[f].test.rmse == c.folds[f].test.rmse);
  }
  CHECK(a.mean_mae == c.mean_mae);
}

TEST_CASE("grid enumeration order") {
  GridSpec g;
  g.dims = {10, 5};
  g.lambdas = {0.01, 0.1};
  g.alphas = {3, 2};
  const auto cells = g.cells(ModelVariant::SPHM1);
  REQUIRE(cells.size() == 8);
  CHECK(cells[0] == GridCell{5, 0.1, 2});
  CHECK(cells[1] == GridCell{5, 0.1, 3});
  CHECK(cells[2] == GridCell{5, 0.01, 2});
  CHECK(cells[7] == GridCell{10, 0.01, 3});
  CHECK(g.cells(ModelVariant::SPHM2).size() == 4);
  g.dims.clear();
  CHECK_THROWS_AS(g.validate(), InvariantError);
}

TEST_CASE("failing folds are recorded only when allowed") {
  const auto ds = planted(9);
  auto folds = make_folds(ds, 5, 10);
  folds.validation_fraction = 0.0;
  GridSpec grid;
  grid.dims = {2};
  grid.lambdas = {0.1};
  CHECK_THROWS(run_cv(ds, ModelVariant::SPHM2, grid, folds, TrainConfig{}));
  ProtocolOptions opts;
  opts.allow_fold_failure = true;
  const auto rep = run_cv(ds, ModelVariant::SPHM2, grid, folds, TrainConfig{}, opts);
  CHECK(rep.failed_folds == 5);
}
