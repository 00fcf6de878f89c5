#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sprec/dataset.hpp"
#include "sprec/item_knn.hpp"
#include "sprec/metrics.hpp"
#include "sprec/trainer.hpp"

namespace sprec {

struct GridCell {
  std::size_t dim;
  double lambda;
  double alpha;  // 1 for models without an exponent

  friend bool operator==(const GridCell&, const GridCell&) = default;
};

/// Hyperparameter lattice. Cells are enumerated with D ascending, then lambda
/// descending, then alpha ascending; the first best cell wins ties.
struct GridSpec {
  std::vector<std::size_t> dims{5, 10, 20};
  std::vector<double> lambdas{0.1, 0.01};
  std::vector<double> alphas{2, 3, 4, 5, 6, 7, 8, 9};
  Metric selection = Metric::RMSE;

  void validate() const;
  std::vector<GridCell> cells(ModelVariant variant) const;
};

ModelKind model_for(ModelVariant variant, const GridCell& cell);
TrainConfig config_for(const TrainConfig& base, const GridCell& cell);
std::string method_name(ModelVariant variant, Cost cost);

struct EvalScore {
  double rmse = 0.0;
  double mae = 0.0;
  std::size_t count = 0;
  std::size_t fallbacks = 0;

  double metric(Metric m) const { return m == Metric::RMSE ? rmse : mae; }
};

/// Scores predictions for ds.ratings()[idx] for every idx in indices.
EvalScore score(const Embedding& emb, const RatingsDataset& ds, std::span<const std::size_t> indices);
EvalScore score(const ItemKnn& knn, const RatingsDataset& ds, std::span<const std::size_t> indices);

struct CellResult {
  GridCell cell;
  EvalScore validation;
  OptimizerStatus status;
  int iterations;
};

struct GridResult {
  std::vector<CellResult> cells;
  std::size_t best = 0;

  const CellResult& best_cell() const { return cells.at(best); }
};

/// Trains every cell on train_indices of ds and scores validation_indices.
GridResult grid_search(const RatingsDataset& ds, std::span<const std::size_t> train_indices,
                       std::span<const std::size_t> validation_indices, ModelVariant variant,
                       const GridSpec& grid, const TrainConfig& base);

struct FoldResult {
  std::size_t fold = 0;
  std::size_t train_size = 0;
  std::size_t validation_size = 0;
  GridResult grid;
  GridCell selected{};
  EvalScore test;
  OptimizerStatus status = OptimizerStatus::MaxIterations;
  int iterations = 0;
  bool failed = false;
  std::string error;
};

struct MetricsReport {
  std::string method;
  std::vector<FoldResult> folds;
  double mean_rmse = 0.0;
  double std_rmse = 0.0;
  double mean_mae = 0.0;
  double std_mae = 0.0;
  std::size_t fallbacks = 0;
  std::size_t failed_folds = 0;

  /// Recomputes the aggregates over non-failed folds (sample std deviation).
  void summarize();
};

struct ProtocolOptions {
  /// Record a failing fold and continue instead of propagating the error.
  bool allow_fold_failure = false;
  std::function<void(std::string_view)> progress;
};

/// Cross-validated protocol: per fold, grid search on a 90/10 split of the
/// training portion, retrain the selected cell on the whole portion, score
/// the test fold.
MetricsReport run_cv(const RatingsDataset& ds, ModelVariant variant, const GridSpec& grid,
                     const FoldPlan& folds, const TrainConfig& base,
                     const ProtocolOptions& options = {});

/// Same folds, ItemKNN trained on each full training portion.
MetricsReport run_cv_item_knn(const RatingsDataset& ds, const FoldPlan& folds,
                              std::size_t k = kDefaultNeighbors,
                              const ProtocolOptions& options = {});

}  // namespace sprec
