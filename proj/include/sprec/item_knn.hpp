#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "sprec/dataset.hpp"
#include "sprec/trainer.hpp"

namespace sprec {

inline constexpr std::size_t kDefaultNeighbors = 25;

/// Item-based neighborhood baseline. Similarity is the Pearson correlation
/// of two items' ratings over the users who rated both (means taken over
/// those co-ratings); it is undefined below min_common co-raters or with zero
/// variance. A prediction is the similarity-weighted mean of the user's
/// ratings on the k most similar positively correlated items they rated.
class ItemKnn {
 public:
  explicit ItemKnn(const RatingsDataset& train, std::size_t k = kDefaultNeighbors,
                   std::size_t min_common = 2);

  /// Pearson similarity, or NaN when undefined.
  double similarity(std::size_t a, std::size_t b) const;
  Prediction predict(std::optional<std::size_t> user, std::optional<std::size_t> item) const;

  std::size_t k() const noexcept { return k_; }

 private:
  using Entry = std::pair<std::uint32_t, double>;  // (other index, rating)
  std::size_t k_;
  std::size_t min_common_;
  std::vector<std::vector<Entry>> by_item_;  // sorted by user
  std::vector<std::vector<Entry>> by_user_;  // sorted by item
  std::vector<double> user_mean_;
  std::vector<double> item_mean_;
  double global_mean_;
  RatingScale scale_;
};

}  // namespace sprec
