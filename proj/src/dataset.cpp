#include "sprec/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "sprec/error.hpp"
#include "sprec/random.hpp"

namespace sprec {

RatingsDataset::RatingsDataset(std::size_t n_users, std::size_t n_items,
                               std::vector<Rating> ratings, RatingScale scale,
                               std::shared_ptr<const IdMap> ids)
    : n_users_(n_users),
      n_items_(n_items),
      ratings_(std::move(ratings)),
      scale_(scale),
      ids_(std::move(ids)) {
  if (!(std::isfinite(scale_.min) && std::isfinite(scale_.max) && scale_.min < scale_.max)) {
    throw InvariantError("rating scale must satisfy r_min < r_max");
  }
  for (const auto& r : ratings_) {
    if (r.user >= n_users_ || r.item >= n_items_) {
      throw InvariantError("rating references a node outside the index space");
    }
    if (!std::isfinite(r.value) || r.value < scale_.min || r.value > scale_.max) {
      throw InvariantError("rating " + std::to_string(r.value) + " outside scale [" +
                           std::to_string(scale_.min) + ", " + std::to_string(scale_.max) + "]");
    }
  }
  compute_statistics();
}

void RatingsDataset::compute_statistics() {
  user_count_.assign(n_users_, 0);
  item_count_.assign(n_items_, 0);
  std::vector<double> user_sum(n_users_, 0.0);
  std::vector<double> item_sum(n_items_, 0.0);
  double total = 0.0;
  for (const auto& r : ratings_) {
    ++user_count_[r.user];
    ++item_count_[r.item];
    user_sum[r.user] += r.value;
    item_sum[r.item] += r.value;
    total += r.value;
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  user_mean_.resize(n_users_);
  item_mean_.resize(n_items_);
  for (std::size_t i = 0; i < n_users_; ++i) {
    user_mean_[i] = user_count_[i] ? user_sum[i] / user_count_[i] : nan;
  }
  for (std::size_t j = 0; j < n_items_; ++j) {
    item_mean_[j] = item_count_[j] ? item_sum[j] / item_count_[j] : nan;
  }
  global_mean_ = ratings_.empty() ? nan : total / static_cast<double>(ratings_.size());
}

RatingsDataset RatingsDataset::restrict(std::span<const std::size_t> subset) const {
  if (subset.empty()) throw DataError("restrict: empty subset");
  std::vector<Rating> picked;
  picked.reserve(subset.size());
  for (auto idx : subset) {
    if (idx >= ratings_.size()) throw InvariantError("restrict: rating index out of range");
    picked.push_back(ratings_[idx]);
  }
  return RatingsDataset(n_users_, n_items_, std::move(picked), scale_, ids_);
}

std::optional<Delimiter> parse_delimiter(std::string_view name) {
  if (name == "auto") return Delimiter::Auto;
  if (name == "comma" || name == ",") return Delimiter::Comma;
  if (name == "tab" || name == "\\t") return Delimiter::Tab;
  if (name == "space" || name == "whitespace") return Delimiter::Whitespace;
  if (name == "::") return Delimiter::DoubleColon;
  return std::nullopt;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

Delimiter detect(std::string_view line) {
  if (line.find('\t') != std::string_view::npos) return Delimiter::Tab;
  if (line.find("::") != std::string_view::npos) return Delimiter::DoubleColon;
  if (line.find(',') != std::string_view::npos) return Delimiter::Comma;
  return Delimiter::Whitespace;
}

// Splits into at most the first three fields; extras are ignored.
std::vector<std::string_view> split_fields(std::string_view line, Delimiter d) {
  std::vector<std::string_view> out;
  if (d == Delimiter::Whitespace) {
    std::size_t pos = 0;
    while (out.size() < 3) {
      pos = line.find_first_not_of(" \t", pos);
      if (pos == std::string_view::npos) break;
      const auto end = line.find_first_of(" \t", pos);
      out.push_back(line.substr(pos, end == std::string_view::npos ? line.size() - pos : end - pos));
      if (end == std::string_view::npos) break;
      pos = end;
    }
    return out;
  }
  const std::string_view sep = d == Delimiter::Tab         ? "\t"
                               : d == Delimiter::Comma     ? ","
                                                           : "::";
  std::size_t pos = 0;
  while (out.size() < 3) {
    const auto end = line.find(sep, pos);
    out.push_back(trim(line.substr(pos, end == std::string_view::npos ? line.size() - pos : end - pos)));
    if (end == std::string_view::npos) break;
    pos = end + sep.size();
  }
  return out;
}

std::optional<double> parse_number(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

struct RawTriple {
  std::string user;
  std::string item;
  double value;
};

}  // namespace

RatingsDataset ingest(const std::filesystem::path& path, const IngestOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open rating file '" + path.string() + "'");
  return ingest(in, path.string(), options);
}

RatingsDataset ingest(std::istream& in, std::string_view source_name,
                      const IngestOptions& options) {
  const std::string source(source_name);
  Delimiter delim = options.delimiter;
  std::vector<RawTriple> raw;
  std::unordered_map<std::string, std::size_t> pair_index;
  std::string line;
  std::size_t line_no = 0;
  bool seen_first = false;

  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty()) continue;
    if (delim == Delimiter::Auto) delim = detect(text);
    const auto fields = split_fields(text, delim);
    const bool first = !seen_first;
    seen_first = true;
    if (fields.size() < 3 || fields[0].empty() || fields[1].empty()) {
      if (first) continue;
      throw DataError(source + ":" + std::to_string(line_no) + ": expected user, item, rating");
    }
    const auto value = parse_number(fields[2]);
    if (!value) {
      if (first) continue;  // header line
      throw DataError(source + ":" + std::to_string(line_no) + ": non-numeric rating '" +
                      std::string(fields[2]) + "'");
    }
    if (!std::isfinite(*value)) {
      throw DataError(source + ":" + std::to_string(line_no) + ": non-finite rating");
    }
    std::string key;
    key.reserve(fields[0].size() + fields[1].size() + 1);
    key.append(fields[0]).push_back('\x1f');
    key.append(fields[1]);
    auto [it, inserted] = pair_index.try_emplace(std::move(key), raw.size());
    if (inserted) {
      raw.push_back({std::string(fields[0]), std::string(fields[1]), *value});
    } else {
      raw[it->second].value = *value;
    }
  }
  if (raw.empty()) throw DataError(source + ": no parsable rating lines");

  std::unordered_map<std::string_view, std::size_t> per_user;
  for (const auto& t : raw) ++per_user[t.user];

  auto ids = std::make_shared<IdMap>();
  std::unordered_map<std::string_view, std::uint32_t> user_ids;
  std::unordered_map<std::string_view, std::uint32_t> item_ids;
  std::vector<Rating> ratings;
  ratings.reserve(raw.size());
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& t : raw) {
    if (per_user[t.user] < options.min_user_ratings) continue;
    auto [u, new_user] = user_ids.try_emplace(t.user, static_cast<std::uint32_t>(ids->users.size()));
    if (new_user) ids->users.push_back(t.user);
    auto [v, new_item] = item_ids.try_emplace(t.item, static_cast<std::uint32_t>(ids->items.size()));
    if (new_item) ids->items.push_back(t.item);
    ratings.push_back({u->second, v->second, t.value});
    lo = std::min(lo, t.value);
    hi = std::max(hi, t.value);
  }
  if (ratings.empty()) {
    throw DataError(source + ": no user has at least " + std::to_string(options.min_user_ratings) +
                    " ratings");
  }

  RatingScale scale{lo, hi};
  if (options.declared_scale) {
    scale = *options.declared_scale;
    if (lo < scale.min || hi > scale.max) {
      throw DataError(source + ": ratings fall outside the declared scale");
    }
  } else if (!(lo < hi)) {
    throw DataError(source + ": all ratings are equal; declare the scale explicitly");
  }
  const auto n = ids->users.size();
  const auto m = ids->items.size();
  return RatingsDataset(n, m, std::move(ratings), scale, std::move(ids));
}

void write_id_map(const std::filesystem::path& path, std::span<const std::string> ids) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write id map '" + path.string() + "'");
  for (std::size_t i = 0; i < ids.size(); ++i) out << i << '\t' << ids[i] << '\n';
  if (!out) throw DataError("failed writing id map '" + path.string() + "'");
}

std::vector<std::string> read_id_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open id map '" + path.string() + "'");
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw DataError(path.string() + ": malformed id map line");
    const auto index = parse_number(std::string_view(line).substr(0, tab));
    if (!index || *index != static_cast<double>(ids.size())) {
      throw DataError(path.string() + ": id map indices must be 0..n-1 in order");
    }
    ids.push_back(line.substr(tab + 1));
  }
  return ids;
}

std::size_t FoldPlan::fold_size(std::size_t fold) const {
  return static_cast<std::size_t>(std::count(assignment.begin(), assignment.end(), fold));
}

std::vector<std::size_t> FoldPlan::test_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::train_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] != fold) out.push_back(i);
  }
  return out;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> FoldPlan::train_validation_split(
    std::size_t fold) const {
  auto train = train_indices(fold);
  Rng rng(seed, "validation-split", fold);
  rng.shuffle(train);
  const auto n_val = static_cast<std::size_t>(
      std::llround(validation_fraction * static_cast<double>(train.size())));
  std::vector<std::size_t> validation(train.end() - static_cast<std::ptrdiff_t>(n_val), train.end());
  train.resize(train.size() - n_val);
  std::sort(train.begin(), train.end());
  std::sort(validation.begin(), validation.end());
  return {std::move(train), std::move(validation)};
}

FoldPlan make_folds(const RatingsDataset& ds, std::size_t k, std::uint64_t seed,
                    double validation_fraction) {
  if (k < 2) throw InvariantError("make_folds: k must be at least 2");
  if (ds.empty()) throw DataError("make_folds: empty dataset");
  if (k > ds.size()) throw InvariantError("make_folds: more folds than ratings");
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
    throw InvariantError("make_folds: validation fraction must be in [0, 1)");
  }
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed, "folds");
  rng.shuffle(order);
  FoldPlan plan;
  plan.seed = seed;
  plan.k = k;
  plan.validation_fraction = validation_fraction;
  plan.rng_algorithm = std::string(kRngAlgorithm);
  plan.assignment.resize(ds.size());
  for (std::size_t p = 0; p < order.size(); ++p) {
    plan.assignment[order[p]] = static_cast<std::uint32_t>(p % k);
  }
  return plan;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> holdout_split(
    std::size_t n_ratings, double holdout_fraction, std::uint64_t seed) {
  std::vector<std::size_t> order(n_ratings);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed, "holdout");
  rng.shuffle(order);
  const auto n_hold = static_cast<std::size_t>(
      std::llround(holdout_fraction * static_cast<double>(n_ratings)));
  std::vector<std::size_t> held(order.end() - static_cast<std::ptrdiff_t>(n_hold), order.end());
  order.resize(n_ratings - n_hold);
  std::sort(order.begin(), order.end());
  std::sort(held.begin(), held.end());
  return {std::move(order), std::move(held)};
}

}  // namespace sprec
