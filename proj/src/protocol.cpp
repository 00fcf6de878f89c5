#include "sprec/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sprec/error.hpp"

namespace sprec {

void GridSpec::validate() const {
  if (dims.empty() || lambdas.empty() || alphas.empty()) {
    throw InvariantError("grid candidate sets must be non-empty");
  }
  for (auto d : dims) {
    if (d < 1) throw InvariantError("grid dimensions must be >= 1");
  }
  for (auto l : lambdas) {
    if (!(l >= 0.0)) throw InvariantError("grid lambdas must be >= 0");
  }
}

std::vector<GridCell> GridSpec::cells(ModelVariant variant) const {
  validate();
  auto d = dims;
  auto l = lambdas;
  std::vector<double> a = variant == ModelVariant::SPHM1 ? alphas : std::vector<double>{1.0};
  std::stable_sort(d.begin(), d.end());
  std::stable_sort(l.begin(), l.end(), std::greater<>());
  std::stable_sort(a.begin(), a.end());
  std::vector<GridCell> out;
  for (auto dim : d) {
    for (auto lambda : l) {
      for (auto alpha : a) out.push_back({dim, lambda, alpha});
    }
  }
  return out;
}

ModelKind model_for(ModelVariant variant, const GridCell& cell) {
  switch (variant) {
    case ModelVariant::SPHM1: return ModelKind::sphm1(cell.alpha);
    case ModelVariant::SPHM2: return ModelKind::sphm2();
    case ModelVariant::SPDP: return ModelKind::spdp();
  }
  return ModelKind::sphm2();
}

TrainConfig config_for(const TrainConfig& base, const GridCell& cell) {
  TrainConfig cfg = base;
  cfg.dim = cell.dim;
  cfg.lambda = cell.lambda;
  return cfg;
}

std::string method_name(ModelVariant variant, Cost cost) {
  return std::string(to_string(variant)) + "-" + std::string(to_string(cost));
}

namespace {

template <class Predictor>
EvalScore score_with(const Predictor& predict_fn, const RatingsDataset& ds,
                     std::span<const std::size_t> indices) {
  if (indices.empty()) throw InvariantError("cannot score an empty rating set");
  std::vector<double> predicted(indices.size());
  std::vector<double> truth(indices.size());
  std::size_t fallbacks = 0;
#pragma omp parallel for schedule(dynamic, 64) reduction(+ : fallbacks)
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto& r = ds[indices[i]];
    const auto p = predict_fn(r.user, r.item);
    predicted[i] = p.rating;
    truth[i] = r.value;
    if (p.fallback != Fallback::None) ++fallbacks;
  }
  return {rmse(predicted, truth), mae(predicted, truth), indices.size(), fallbacks};
}

}  // namespace

EvalScore score(const Embedding& emb, const RatingsDataset& ds, std::span<const std::size_t> indices) {
  return score_with([&](std::size_t u, std::size_t v) { return predict(emb, u, v); }, ds, indices);
}

EvalScore score(const ItemKnn& knn, const RatingsDataset& ds, std::span<const std::size_t> indices) {
  return score_with([&](std::size_t u, std::size_t v) { return knn.predict(u, v); }, ds, indices);
}

GridResult grid_search(const RatingsDataset& ds, std::span<const std::size_t> train_indices,
                       std::span<const std::size_t> validation_indices, ModelVariant variant,
                       const GridSpec& grid, const TrainConfig& base) {
  const auto train_view = ds.restrict(train_indices);
  GridResult result;
  for (const auto& cell : grid.cells(variant)) {
    const auto emb = train(train_view, model_for(variant, cell), config_for(base, cell));
    result.cells.push_back({cell, score(emb, ds, validation_indices), emb.provenance.status,
                            emb.provenance.iterations});
  }
  for (std::size_t c = 1; c < result.cells.size(); ++c) {
    if (result.cells[c].validation.metric(grid.selection) <
        result.cells[result.best].validation.metric(grid.selection)) {
      result.best = c;
    }
  }
  return result;
}

void MetricsReport::summarize() {
  std::vector<double> r, a;
  fallbacks = 0;
  failed_folds = 0;
  for (const auto& f : folds) {
    if (f.failed) {
      ++failed_folds;
      continue;
    }
    r.push_back(f.test.rmse);
    a.push_back(f.test.mae);
    fallbacks += f.test.fallbacks;
  }
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? std::nan("") : s / static_cast<double>(v.size());
  };
  auto stddev = [](const std::vector<double>& v, double m) {
    if (v.size() < 2) return 0.0;
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
  };
  mean_rmse = mean(r);
  mean_mae = mean(a);
  std_rmse = stddev(r, mean_rmse);
  std_mae = stddev(a, mean_mae);
}

MetricsReport run_cv(const RatingsDataset& ds, ModelVariant variant, const GridSpec& grid,
                     const FoldPlan& folds, const TrainConfig& base,
                     const ProtocolOptions& options) {
  if (folds.assignment.size() != ds.size()) {
    throw InvariantError("fold plan does not match the dataset");
  }
  grid.validate();
  MetricsReport report;
  report.method = method_name(variant, base.cost);
  for (std::size_t f = 0; f < folds.k; ++f) {
    FoldResult fr;
    fr.fold = f;
    try {
      const auto [proper, validation] = folds.train_validation_split(f);
      const auto train_idx = folds.train_indices(f);
      const auto test_idx = folds.test_indices(f);
      fr.train_size = train_idx.size();
      fr.validation_size = validation.size();
      if (validation.empty()) throw DataError("validation split is empty");
      fr.grid = grid_search(ds, proper, validation, variant, grid, base);
      fr.selected = fr.grid.best_cell().cell;
      if (options.progress) {
        options.progress("fold " + std::to_string(f) + ": selected D=" +
                         std::to_string(fr.selected.dim) + " lambda=" +
                         std::to_string(fr.selected.lambda) + " alpha=" +
                         std::to_string(fr.selected.alpha));
      }
      const auto emb = train(ds.restrict(train_idx), model_for(variant, fr.selected),
                             config_for(base, fr.selected));
      fr.status = emb.provenance.status;
      fr.iterations = emb.provenance.iterations;
      fr.test = score(emb, ds, test_idx);
      if (options.progress) {
        options.progress("fold " + std::to_string(f) + ": rmse=" + std::to_string(fr.test.rmse) +
                         " mae=" + std::to_string(fr.test.mae));
      }
    } catch (const std::exception& e) {
      if (!options.allow_fold_failure) throw;
      fr.failed = true;
      fr.error = e.what();
    }
    report.folds.push_back(std::move(fr));
  }
  report.summarize();
  return report;
}

MetricsReport run_cv_item_knn(const RatingsDataset& ds, const FoldPlan& folds, std::size_t k,
                              const ProtocolOptions& options) {
  if (folds.assignment.size() != ds.size()) {
    throw InvariantError("fold plan does not match the dataset");
  }
  MetricsReport report;
  report.method = "ItemKNN";
  for (std::size_t f = 0; f < folds.k; ++f) {
    FoldResult fr;
    fr.fold = f;
    const auto train_idx = folds.train_indices(f);
    const auto test_idx = folds.test_indices(f);
    fr.train_size = train_idx.size();
    fr.status = OptimizerStatus::Converged;
    const ItemKnn knn(ds.restrict(train_idx), k);
    fr.test = score(knn, ds, test_idx);
    if (options.progress) {
      options.progress("fold " + std::to_string(f) + ": rmse=" + std::to_string(fr.test.rmse) +
                       " mae=" + std::to_string(fr.test.mae));
    }
    report.folds.push_back(std::move(fr));
  }
  report.summarize();
  return report;
}

}  // namespace sprec
