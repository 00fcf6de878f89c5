#include "sprec/report.hpp"

#include <ctime>
#include <fstream>
#include <sstream>

#include "sprec/error.hpp"
#include "sprec/io.hpp"
#include "sprec/random.hpp"

namespace sprec {

Json to_json(const RatingScale& s) { return {{"r_min", s.min}, {"r_max", s.max}}; }

Json to_json(const OptimizerConfig& c) {
  return {{"max_iterations", c.max_iterations},
          {"grad_tolerance", c.grad_tolerance},
          {"sufficient_decrease", c.sufficient_decrease},
          {"curvature", c.curvature},
          {"restart_interval", c.restart_interval},
          {"max_line_search_evaluations", c.max_line_search_evaluations},
          {"descent_bound", c.descent_bound}};
}

Json to_json(const TrainConfig& c) {
  return {{"dim", c.dim},
          {"lambda", c.lambda},
          {"cost", std::string(to_string(c.cost))},
          {"seed", c.seed},
          {"init_scale", c.init_scale},
          {"p_min", c.p_min},
          {"p_max", c.p_max},
          {"deterministic", c.deterministic},
          {"optimizer", to_json(c.optimizer)}};
}

Json to_json(const GridSpec& g) {
  return {{"dims", g.dims},
          {"lambdas", g.lambdas},
          {"alphas", g.alphas},
          {"selection", std::string(to_string(g.selection))}};
}

Json to_json(const EvalScore& s) {
  return {{"rmse", s.rmse}, {"mae", s.mae}, {"count", s.count}, {"fallbacks", s.fallbacks}};
}

namespace {

Json cell_json(const GridCell& c) { return {{"dim", c.dim}, {"lambda", c.lambda}, {"alpha", c.alpha}}; }

}  // namespace

Json to_json(const GridResult& g) {
  Json cells = Json::array();
  for (const auto& c : g.cells) {
    Json j = cell_json(c.cell);
    j["validation"] = to_json(c.validation);
    j["status"] = std::string(to_string(c.status));
    j["iterations"] = c.iterations;
    cells.push_back(std::move(j));
  }
  Json out = {{"cells", cells}};
  if (!g.cells.empty()) out["best"] = cell_json(g.best_cell().cell);
  return out;
}

Json to_json(const FoldResult& f) {
  Json j = {{"fold", f.fold}, {"train_size", f.train_size}, {"validation_size", f.validation_size}};
  if (f.failed) {
    j["failed"] = true;
    j["error"] = f.error;
    return j;
  }
  if (!f.grid.cells.empty()) {
    j["selected"] = cell_json(f.selected);
    j["grid"] = to_json(f.grid);
  }
  j["test"] = to_json(f.test);
  j["status"] = std::string(to_string(f.status));
  j["iterations"] = f.iterations;
  return j;
}

Json to_json(const MetricsReport& r) {
  Json folds = Json::array();
  for (const auto& f : r.folds) folds.push_back(to_json(f));
  return {{"method", r.method},
          {"mean_rmse", r.mean_rmse},
          {"std_rmse", r.std_rmse},
          {"mean_mae", r.mean_mae},
          {"std_mae", r.std_mae},
          {"fallbacks", r.fallbacks},
          {"failed_folds", r.failed_folds},
          {"folds", folds}};
}

Json to_json(const RankTable& t) {
  Json methods = Json::array();
  for (std::size_t m = 0; m < t.methods.size(); ++m) {
    Json per = Json::object();
    for (std::size_t d = 0; d < t.datasets.size(); ++d) per[t.datasets[d]] = t.ranks[d][m];
    methods.push_back({{"method", t.methods[m]}, {"mean_rank", t.mean_rank[m]}, {"ranks", per}});
  }
  return {{"datasets", t.datasets}, {"methods", methods}};
}

Json to_json(const NetGenConfig& c) {
  return {{"nodes", c.nodes},
          {"gamma", c.gamma},
          {"alpha", c.alpha},
          {"circumference", c.ring_length()},
          {"kappa_min", c.kappa_min},
          {"mean_degree", c.mean_degree},
          {"seed", c.seed},
          {"rng", std::string(kRngAlgorithm)}};
}

Json to_json(const Provenance& p) {
  return {{"seed", p.seed},
          {"cost", std::string(to_string(p.objective.cost))},
          {"lambda", p.objective.lambda},
          {"status", std::string(to_string(p.status))},
          {"iterations", p.iterations},
          {"initial_value", p.initial_value},
          {"final_value", p.final_value}};
}

Json Report::reproducible() const {
  return {{"command", command}, {"config", config}, {"results", results}};
}

Json Report::to_json() const {
  Json j = reproducible();
  j["run"] = run;
  return j;
}

std::string flatten(const Json& j, std::string_view prefix) {
  std::string out;
  auto key = [&](const std::string& k) { return prefix.empty() ? k : std::string(prefix) + "." + k; };
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) out += flatten(v, key(k));
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) out += flatten(j[i], key(std::to_string(i)));
  } else {
    out += std::string(prefix) + "=";
    if (j.is_string()) {
      out += j.get<std::string>();
    } else if (j.is_number_float()) {
      out += format_double(j.get<double>());
    } else {
      out += j.dump();
    }
    out += '\n';
  }
  return out;
}

std::string Report::to_text() const {
  return "command=" + command + "\n" + flatten(config, "config") + flatten(results, "results");
}

void stamp(Report& report, std::chrono::system_clock::time_point start) {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(start);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  report.run["started"] = buf;
  report.run["elapsed_seconds"] = std::chrono::duration<double>(now - start).count();
}

void write_report(const Report& report, const std::filesystem::path& path) {
  write_file_atomic(path, report.to_json().dump(2) + "\n");
}

Json read_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open report " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw FormatError("malformed report " + path.string() + ": " + e.what());
  }
}

}  // namespace sprec
