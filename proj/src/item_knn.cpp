#include "sprec/item_knn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sprec/error.hpp"

namespace sprec {

ItemKnn::ItemKnn(const RatingsDataset& train, std::size_t k, std::size_t min_common)
    : k_(k),
      min_common_(std::max<std::size_t>(min_common, 2)),
      by_item_(train.n_items()),
      by_user_(train.n_users()),
      user_mean_(train.n_users()),
      item_mean_(train.n_items()),
      global_mean_(train.global_mean()),
      scale_(train.scale()) {
  if (k_ < 1) throw InvariantError("ItemKNN needs k >= 1");
  for (const auto& r : train.ratings()) {
    by_item_[r.item].emplace_back(r.user, r.value);
    by_user_[r.user].emplace_back(r.item, r.value);
  }
  for (auto& v : by_item_) std::sort(v.begin(), v.end());
  for (auto& v : by_user_) std::sort(v.begin(), v.end());
  for (std::size_t i = 0; i < train.n_users(); ++i) user_mean_[i] = train.user_mean(i);
  for (std::size_t j = 0; j < train.n_items(); ++j) item_mean_[j] = train.item_mean(j);
}

double ItemKnn::similarity(std::size_t a, std::size_t b) const {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (a >= by_item_.size() || b >= by_item_.size()) return nan;
  const auto& va = by_item_[a];
  const auto& vb = by_item_[b];
  // Merge the two user-sorted lists twice: once for means, once for moments.
  std::size_t n = 0;
  double sa = 0.0, sb = 0.0;
  for (std::size_t i = 0, j = 0; i < va.size() && j < vb.size();) {
    if (va[i].first < vb[j].first) {
      ++i;
    } else if (vb[j].first < va[i].first) {
      ++j;
    } else {
      sa += va[i].second;
      sb += vb[j].second;
      ++n;
      ++i;
      ++j;
    }
  }
  if (n < min_common_) return nan;
  const double ma = sa / static_cast<double>(n);
  const double mb = sb / static_cast<double>(n);
  double num = 0.0, da = 0.0, db = 0.0;
  for (std::size_t i = 0, j = 0; i < va.size() && j < vb.size();) {
    if (va[i].first < vb[j].first) {
      ++i;
    } else if (vb[j].first < va[i].first) {
      ++j;
    } else {
      const double xa = va[i].second - ma;
      const double xb = vb[j].second - mb;
      num += xa * xb;
      da += xa * xa;
      db += xb * xb;
      ++i;
      ++j;
    }
  }
  if (da <= 0.0 || db <= 0.0) return nan;
  return std::clamp(num / std::sqrt(da * db), -1.0, 1.0);
}

Prediction ItemKnn::predict(std::optional<std::size_t> user, std::optional<std::size_t> item) const {
  const bool user_known = user && *user < by_user_.size() && !by_user_[*user].empty();
  const bool item_known = item && *item < by_item_.size() && !by_item_[*item].empty();
  if (!user_known && !item_known) return {global_mean_, Fallback::GlobalMean};
  if (!user_known) return {item_mean_[*item], Fallback::ItemAverage};
  if (!item_known) return {user_mean_[*user], Fallback::UserAverage};

  struct Neighbor {
    double sim;
    std::uint32_t item;
    double rating;
  };
  std::vector<Neighbor> candidates;
  for (const auto& [other, rating] : by_user_[*user]) {
    if (other == *item) continue;
    const double s = similarity(*item, other);
    if (s > 0.0) candidates.push_back({s, other, rating});
  }
  if (candidates.empty()) return {user_mean_[*user], Fallback::UserAverage};
  const auto keep = std::min(k_, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                    candidates.end(), [](const Neighbor& a, const Neighbor& b) {
                      return a.sim != b.sim ? a.sim > b.sim : a.item < b.item;
                    });
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < keep; ++i) {
    num += candidates[i].sim * candidates[i].rating;
    den += candidates[i].sim;
  }
  return {std::clamp(num / den, scale_.min, scale_.max), Fallback::None};
}

}  // namespace sprec
