#include "sprec/trainer.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "sprec/error.hpp"
#include "sprec/io.hpp"
#include "sprec/random.hpp"

namespace sprec {

void TrainConfig::validate() const {
  if (dim < 1) throw InvariantError("dimension must be at least 1");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvariantError("lambda must be >= 0");
  if (!(init_scale > 0.0) || !std::isfinite(init_scale)) {
    throw InvariantError("init_scale must be > 0");
  }
  optimizer.validate();
}

void Embedding::validate() const {
  const auto n = user_degrees.size();
  const auto m = item_degrees.size();
  if (dim < 1) throw InvariantError("embedding dimension must be at least 1");
  if (user_coords.size() != n * dim || item_coords.size() != m * dim ||
      user_observed.size() != n || item_observed.size() != m) {
    throw InvariantError("embedding arrays do not match n, m, dim");
  }
  for (double v : user_coords) {
    if (!std::isfinite(v)) throw InvariantError("non-finite user coordinate");
  }
  for (double v : item_coords) {
    if (!std::isfinite(v)) throw InvariantError("non-finite item coordinate");
  }
  for (double k : user_degrees) validate_degree(k, model, scaling);
  for (double k : item_degrees) validate_degree(k, model, scaling);
  if (!(global_mean >= scaling.r_min() && global_mean <= scaling.r_max())) {
    throw InvariantError("global mean outside the rating scale");
  }
}

TrainingProblem make_problem(const RatingsDataset& train_set, const ModelKind& model,
                             const TrainConfig& cfg) {
  const ScalingConfig scaling(cfg.p_min, cfg.p_max, train_set.scale());
  auto degrees = assign_degrees(train_set, model, scaling);
  std::vector<ScaledRating> scaled;
  scaled.reserve(train_set.size());
  for (const auto& r : train_set.ratings()) scaled.push_back({r.user, r.item, phi(r.value, scaling)});
  return TrainingProblem(train_set.n_users(), train_set.n_items(), cfg.dim, model,
                         cfg.objective(), std::move(scaled), std::move(degrees.users),
                         std::move(degrees.items), cfg.deterministic);
}

std::vector<double> initial_parameters(std::size_t count, const TrainConfig& cfg) {
  Rng rng(cfg.seed, "init");
  std::vector<double> x(count);
  for (auto& v : x) v = rng.uniform(-cfg.init_scale, cfg.init_scale);
  return x;
}

Embedding train(const RatingsDataset& train_set, const ModelKind& model, const TrainConfig& cfg) {
  cfg.validate();
  if (train_set.empty()) throw DataError("train: empty training set");
  const auto problem = make_problem(train_set, model, cfg);

  // Points where the objective overflows are reported as +inf so the line
  // search backs off instead of aborting.
  bool at_start = true;
  ObjectiveFn fn = [&](std::span<const double> x, std::span<double> g) {
    if (at_start) {
      at_start = false;
      return problem.value_and_gradient(x, g);
    }
    try {
      return problem.value_and_gradient(x, g);
    } catch (const NonFiniteError&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  auto result = minimize(fn, initial_parameters(problem.parameter_count(), cfg), cfg.optimizer);

  Embedding emb;
  emb.model = model;
  emb.dim = cfg.dim;
  const auto split = static_cast<std::ptrdiff_t>(train_set.n_users() * cfg.dim);
  emb.user_coords.assign(result.x.begin(), result.x.begin() + split);
  emb.item_coords.assign(result.x.begin() + split, result.x.end());
  emb.user_degrees.assign(problem.user_degrees().begin(), problem.user_degrees().end());
  emb.item_degrees.assign(problem.item_degrees().begin(), problem.item_degrees().end());
  emb.user_observed.resize(train_set.n_users());
  emb.item_observed.resize(train_set.n_items());
  for (std::size_t i = 0; i < train_set.n_users(); ++i) emb.user_observed[i] = train_set.user_observed(i);
  for (std::size_t j = 0; j < train_set.n_items(); ++j) emb.item_observed[j] = train_set.item_observed(j);
  emb.scaling = ScalingConfig(cfg.p_min, cfg.p_max, train_set.scale());
  emb.global_mean = train_set.global_mean();
  emb.provenance = {cfg.seed, cfg.objective(), result.status, result.iterations,
                    result.value_trace.front(), result.value};
  emb.validate();
  return emb;
}

std::string_view to_string(Fallback f) {
  switch (f) {
    case Fallback::None: return "none";
    case Fallback::ItemAverage: return "item-average";
    case Fallback::UserAverage: return "user-average";
    case Fallback::GlobalMean: return "global-mean";
  }
  return "?";
}

Prediction predict(const Embedding& emb, std::optional<std::size_t> user,
                   std::optional<std::size_t> item) {
  const bool user_known = user && *user < emb.n_users() && emb.user_observed[*user];
  const bool item_known = item && *item < emb.n_items() && emb.item_observed[*item];
  if (user_known && item_known) {
    const double p = connection_score(emb.model, emb.user(*user), emb.item(*item),
                                      emb.user_degrees[*user], emb.item_degrees[*item]);
    return {phi_inverse(p, emb.scaling), Fallback::None};
  }
  if (item_known) {
    return {average_from_degree(emb.item_degrees[*item], emb.model, emb.scaling),
            Fallback::ItemAverage};
  }
  if (user_known) {
    return {average_from_degree(emb.user_degrees[*user], emb.model, emb.scaling),
            Fallback::UserAverage};
  }
  return {emb.global_mean, Fallback::GlobalMean};
}

namespace {

void put(std::ostringstream& out, std::string_view key, const std::string& value) {
  out << key << ' ' << value << '\n';
}

void put_rows(std::ostringstream& out, std::span<const double> values, std::size_t width) {
  for (std::size_t r = 0; r * width < values.size(); ++r) {
    for (std::size_t k = 0; k < width; ++k) {
      if (k) out << ' ';
      out << format_double(values[r * width + k]);
    }
    out << '\n';
  }
}

class Reader {
 public:
  Reader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  std::vector<std::string> line() {
    std::string text;
    if (!std::getline(in_, text)) throw FormatError(source_ + ": truncated model file");
    ++line_no_;
    std::istringstream ss(text);
    std::vector<std::string> tokens;
    for (std::string t; ss >> t;) tokens.push_back(std::move(t));
    return tokens;
  }

  std::string value(std::string_view key) {
    const auto tokens = line();
    if (tokens.size() != 2 || tokens[0] != key) {
      throw FormatError(source_ + ":" + std::to_string(line_no_) + ": expected '" +
                        std::string(key) + " <value>'");
    }
    return tokens[1];
  }

  double number(std::string_view key) { return parse_double(value(key)); }

  std::size_t count(std::string_view key) {
    const double v = number(key);
    if (!(v >= 0.0) || v != std::floor(v)) throw FormatError(source_ + ": bad count for " + std::string(key));
    return static_cast<std::size_t>(v);
  }

  void section(std::string_view name) {
    const auto tokens = line();
    if (tokens.size() != 1 || tokens[0] != name) {
      throw FormatError(source_ + ":" + std::to_string(line_no_) + ": expected section '" +
                        std::string(name) + "'");
    }
  }

  std::vector<double> row(std::size_t width) {
    const auto tokens = line();
    if (tokens.size() != width) {
      throw FormatError(source_ + ":" + std::to_string(line_no_) + ": expected " +
                        std::to_string(width) + " values");
    }
    std::vector<double> out;
    for (const auto& t : tokens) out.push_back(parse_double(t));
    return out;
  }

 private:
  std::istream& in_;
  std::string source_;
  std::size_t line_no_ = 0;
};

}  // namespace

void save(const Embedding& emb, const std::filesystem::path& path) {
  emb.validate();
  std::ostringstream out;
  out << kModelMagic << ' ' << kModelVersion << '\n';
  put(out, "model", emb.model.name());
  put(out, "alpha", format_double(emb.model.alpha()));
  put(out, "dim", std::to_string(emb.dim));
  put(out, "users", std::to_string(emb.n_users()));
  put(out, "items", std::to_string(emb.n_items()));
  put(out, "p_min", format_double(emb.scaling.p_min()));
  put(out, "p_max", format_double(emb.scaling.p_max()));
  put(out, "r_min", format_double(emb.scaling.r_min()));
  put(out, "r_max", format_double(emb.scaling.r_max()));
  put(out, "seed", std::to_string(emb.provenance.seed));
  put(out, "global_mean", format_double(emb.global_mean));
  put(out, "objective", std::string(to_string(emb.provenance.objective.cost)));
  put(out, "lambda", format_double(emb.provenance.objective.lambda));
  put(out, "status", std::string(to_string(emb.provenance.status)));
  put(out, "iterations", std::to_string(emb.provenance.iterations));
  put(out, "initial_value", format_double(emb.provenance.initial_value));
  put(out, "final_value", format_double(emb.provenance.final_value));
  out << "user_degrees\n";
  for (std::size_t i = 0; i < emb.n_users(); ++i) {
    out << format_double(emb.user_degrees[i]) << ' ' << int(emb.user_observed[i]) << '\n';
  }
  out << "item_degrees\n";
  for (std::size_t j = 0; j < emb.n_items(); ++j) {
    out << format_double(emb.item_degrees[j]) << ' ' << int(emb.item_observed[j]) << '\n';
  }
  out << "user_coords\n";
  put_rows(out, emb.user_coords, emb.dim);
  out << "item_coords\n";
  put_rows(out, emb.item_coords, emb.dim);
  out << "end\n";
  write_file_atomic(path, out.str());
}

Embedding load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open model file '" + path.string() + "'");
  Reader rd(in, path.string());
  const auto header = rd.line();
  if (header.size() != 2 || header[0] != kModelMagic) {
    throw FormatError(path.string() + ": not a model file (bad magic)");
  }
  if (header[1] != std::to_string(kModelVersion)) {
    throw FormatError(path.string() + ": unsupported model format version " + header[1]);
  }
  Embedding emb;
  const auto model_name = rd.value("model");
  const double alpha = rd.number("alpha");
  emb.model = ModelKind::parse(model_name, alpha);
  emb.dim = rd.count("dim");
  const auto n = rd.count("users");
  const auto m = rd.count("items");
  const double p_min = rd.number("p_min");
  const double p_max = rd.number("p_max");
  const double r_min = rd.number("r_min");
  const double r_max = rd.number("r_max");
  emb.scaling = ScalingConfig(p_min, p_max, RatingScale{r_min, r_max});
  emb.provenance.seed = std::stoull(rd.value("seed"));
  emb.global_mean = rd.number("global_mean");
  emb.provenance.objective.cost = parse_cost(rd.value("objective"));
  emb.provenance.objective.lambda = rd.number("lambda");
  emb.provenance.status = parse_optimizer_status(rd.value("status"));
  emb.provenance.iterations = static_cast<int>(rd.count("iterations"));
  emb.provenance.initial_value = rd.number("initial_value");
  emb.provenance.final_value = rd.number("final_value");

  auto read_degrees = [&](std::string_view section, std::size_t count, std::vector<double>& degrees,
                          std::vector<std::uint8_t>& observed) {
    rd.section(section);
    degrees.resize(count);
    observed.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      const auto r = rd.row(2);
      if (r[1] != 0.0 && r[1] != 1.0) throw FormatError(path.string() + ": bad observed flag");
      degrees[i] = r[0];
      observed[i] = static_cast<std::uint8_t>(r[1]);
    }
  };
  read_degrees("user_degrees", n, emb.user_degrees, emb.user_observed);
  read_degrees("item_degrees", m, emb.item_degrees, emb.item_observed);

  auto read_coords = [&](std::string_view section, std::size_t count, std::vector<double>& coords) {
    rd.section(section);
    coords.reserve(count * emb.dim);
    for (std::size_t i = 0; i < count; ++i) {
      const auto r = rd.row(emb.dim);
      coords.insert(coords.end(), r.begin(), r.end());
    }
  };
  read_coords("user_coords", n, emb.user_coords);
  read_coords("item_coords", m, emb.item_coords);
  rd.section("end");
  emb.validate();
  return emb;
}

}  // namespace sprec
