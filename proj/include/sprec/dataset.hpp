#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sprec {

struct Rating {
  std::uint32_t user;
  std::uint32_t item;
  double value;
};

struct RatingScale {
  double min;
  double max;

  friend bool operator==(const RatingScale&, const RatingScale&) = default;
};

/// Original identifiers, indexed by dense id.
struct IdMap {
  std::vector<std::string> users;
  std::vector<std::string> items;
};

/// Immutable collection of ratings over dense user ids [0, n) and item ids
/// [0, m). Users or items with no rating in this view are still addressable
/// and reported as unobserved; their averages are undefined.
class RatingsDataset {
 public:
  RatingsDataset(std::size_t n_users, std::size_t n_items, std::vector<Rating> ratings,
                 RatingScale scale, std::shared_ptr<const IdMap> ids = nullptr);

  std::size_t n_users() const noexcept { return n_users_; }
  std::size_t n_items() const noexcept { return n_items_; }
  std::size_t size() const noexcept { return ratings_.size(); }
  bool empty() const noexcept { return ratings_.empty(); }
  std::span<const Rating> ratings() const noexcept { return ratings_; }
  const Rating& operator[](std::size_t i) const { return ratings_[i]; }

  RatingScale scale() const noexcept { return scale_; }
  double global_mean() const noexcept { return global_mean_; }

  std::size_t user_count(std::size_t user) const { return user_count_[user]; }
  std::size_t item_count(std::size_t item) const { return item_count_[item]; }
  bool user_observed(std::size_t user) const { return user_count_[user] > 0; }
  bool item_observed(std::size_t item) const { return item_count_[item] > 0; }
  /// Mean rating of an observed user; NaN when unobserved.
  double user_mean(std::size_t user) const { return user_mean_[user]; }
  double item_mean(std::size_t item) const { return item_mean_[item]; }

  /// May be null for synthetic datasets.
  const std::shared_ptr<const IdMap>& ids() const noexcept { return ids_; }

  /// View over a subset of rating indices. Counts and averages are recomputed
  /// on the subset; the node index space, scale, and id map are kept.
  RatingsDataset restrict(std::span<const std::size_t> subset) const;

 private:
  void compute_statistics();

  std::size_t n_users_;
  std::size_t n_items_;
  std::vector<Rating> ratings_;
  RatingScale scale_;
  std::shared_ptr<const IdMap> ids_;
  std::vector<std::uint32_t> user_count_;
  std::vector<std::uint32_t> item_count_;
  std::vector<double> user_mean_;
  std::vector<double> item_mean_;
  double global_mean_ = 0.0;
};

enum class Delimiter { Auto, Comma, Tab, Whitespace, DoubleColon };

std::optional<Delimiter> parse_delimiter(std::string_view name);

struct IngestOptions {
  Delimiter delimiter = Delimiter::Auto;
  /// Overrides the observed rating range when present.
  std::optional<RatingScale> declared_scale;
  std::size_t min_user_ratings = 5;
};

/// Reads "user item rating [extras...]" lines. One leading header line is
/// skipped when its rating field is not numeric. Repeated (user, item) pairs
/// keep the value of the last occurrence at the position of the first. Users
/// with fewer than min_user_ratings ratings are dropped before dense ids are
/// assigned in order of first appearance.
RatingsDataset ingest(const std::filesystem::path& path, const IngestOptions& options = {});
RatingsDataset ingest(std::istream& in, std::string_view source_name,
                      const IngestOptions& options = {});

/// Writes "dense_index<TAB>original_id" lines.
void write_id_map(const std::filesystem::path& path, std::span<const std::string> ids);
std::vector<std::string> read_id_map(const std::filesystem::path& path);

/// Random partition of rating indices into k folds of near-equal size.
struct FoldPlan {
  std::uint64_t seed = 0;
  std::size_t k = 0;
  double validation_fraction = 0.1;
  std::string rng_algorithm;
  std::vector<std::uint32_t> assignment;  // fold index per rating

  std::size_t fold_size(std::size_t fold) const;
  std::vector<std::size_t> test_indices(std::size_t fold) const;
  std::vector<std::size_t> train_indices(std::size_t fold) const;
  /// Deterministic (proper-train, validation) split of train_indices(fold).
  std::pair<std::vector<std::size_t>, std::vector<std::size_t>> train_validation_split(
      std::size_t fold) const;
};

FoldPlan make_folds(const RatingsDataset& ds, std::size_t k, std::uint64_t seed,
                    double validation_fraction = 0.1);

/// Deterministic holdout of a fraction of all ratings (used by grid search
/// outside cross-validation).
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> holdout_split(
    std::size_t n_ratings, double holdout_fraction, std::uint64_t seed);

}  // namespace sprec
