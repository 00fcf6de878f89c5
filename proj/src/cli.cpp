#include "sprec/cli.hpp"

#include <omp.h>

#include <charconv>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sprec/dataset.hpp"
#include "sprec/error.hpp"
#include "sprec/io.hpp"
#include "sprec/netgen.hpp"
#include "sprec/protocol.hpp"
#include "sprec/random.hpp"
#include "sprec/rank.hpp"
#include "sprec/report.hpp"
#include "sprec/trainer.hpp"

namespace sprec {
namespace {

struct Shared {
  std::uint64_t seed = 0;
  int threads = 0;
  bool deterministic = true;
  double p_min = kDefaultPMin;
  double p_max = kDefaultPMax;
  std::string scale;
  std::string delimiter = "auto";
  std::string report_path;
  bool quiet = false;
};

struct ModelFlags {
  std::string model = "sphm2";
  double alpha = 2.0;
  std::string cost = "l2";
  std::size_t dim = 10;
  double lambda = 0.01;
  double init_scale = 0.1;
  int max_iterations = OptimizerConfig{}.max_iterations;
  double grad_tolerance = OptimizerConfig{}.grad_tolerance;
};

struct GridFlags {
  std::vector<std::size_t> dims{5, 10, 20};
  std::vector<double> lambdas{0.1, 0.01};
  std::vector<double> alphas{2, 3, 4, 5, 6, 7, 8, 9};
  std::string selection;  // empty: rmse for l2, mae for l1
};

std::optional<RatingScale> parse_scale(const std::string& text) {
  if (text.empty()) return std::nullopt;
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw InvariantError("--scale expects r_min:r_max, got '" + text + "'");
  const RatingScale s{parse_double(text.substr(0, colon)), parse_double(text.substr(colon + 1))};
  if (!(s.min < s.max)) throw InvariantError("--scale requires r_min < r_max");
  return s;
}

IngestOptions ingest_options(const Shared& sh, std::size_t min_user_ratings) {
  IngestOptions o;
  const auto d = parse_delimiter(sh.delimiter);
  if (!d) throw InvariantError("unknown delimiter '" + sh.delimiter + "'");
  o.delimiter = *d;
  o.declared_scale = parse_scale(sh.scale);
  o.min_user_ratings = min_user_ratings;
  return o;
}

Json shared_json(const Shared& sh) {
  Json j = {{"seed", sh.seed},
            {"threads", omp_get_max_threads()},
            {"deterministic", sh.deterministic},
            {"p_min", sh.p_min},
            {"p_max", sh.p_max},
            {"delimiter", sh.delimiter},
            {"rng", std::string(kRngAlgorithm)}};
  j["scale"] = sh.scale.empty() ? Json("observed") : Json(sh.scale);
  return j;
}

Json dataset_json(const RatingsDataset& ds) {
  const double cells = static_cast<double>(ds.n_users()) * static_cast<double>(ds.n_items());
  return {{"users", ds.n_users()},
          {"items", ds.n_items()},
          {"ratings", ds.size()},
          {"density", static_cast<double>(ds.size()) / cells},
          {"scale", to_json(ds.scale())},
          {"global_mean", ds.global_mean()}};
}

TrainConfig train_config(const Shared& sh, const ModelFlags& mf) {
  TrainConfig c;
  c.dim = mf.dim;
  c.lambda = mf.lambda;
  c.cost = parse_cost(mf.cost);
  c.seed = sh.seed;
  c.init_scale = mf.init_scale;
  c.p_min = sh.p_min;
  c.p_max = sh.p_max;
  c.deterministic = sh.deterministic;
  c.optimizer.max_iterations = mf.max_iterations;
  c.optimizer.grad_tolerance = mf.grad_tolerance;
  c.validate();
  return c;
}

GridSpec grid_spec(const GridFlags& gf, Cost cost) {
  GridSpec g;
  g.dims = gf.dims;
  g.lambdas = gf.lambdas;
  g.alphas = gf.alphas;
  g.selection = gf.selection.empty() ? (cost == Cost::L1 ? Metric::MAE : Metric::RMSE)
                                     : parse_metric(gf.selection);
  g.validate();
  return g;
}

void add_model_flags(CLI::App* cmd, ModelFlags& mf) {
  cmd->add_option("--model", mf.model, "sphm1, sphm2, or spdp")->capture_default_str();
  cmd->add_option("--alpha", mf.alpha, "SPHM1 exponent (> 1)")->capture_default_str();
  cmd->add_option("--cost", mf.cost, "l2 or l1")->capture_default_str();
  cmd->add_option("--dim", mf.dim, "embedding dimension")->capture_default_str();
  cmd->add_option("--lambda", mf.lambda, "regularization coefficient")->capture_default_str();
  cmd->add_option("--init-scale", mf.init_scale, "half-width of the uniform initialization")
      ->capture_default_str();
  cmd->add_option("--max-iters", mf.max_iterations, "conjugate-gradient iteration cap")
      ->capture_default_str();
  cmd->add_option("--grad-tol", mf.grad_tolerance, "gradient sup-norm stopping tolerance")
      ->capture_default_str();
}

void add_grid_flags(CLI::App* cmd, GridFlags& gf) {
  cmd->add_option("--dims", gf.dims, "candidate dimensions")->delimiter(',')->capture_default_str();
  cmd->add_option("--lambdas", gf.lambdas, "candidate lambdas")->delimiter(',')->capture_default_str();
  cmd->add_option("--alphas", gf.alphas, "candidate SPHM1 exponents")->delimiter(',')->capture_default_str();
  cmd->add_option("--selection", gf.selection, "validation metric (rmse or mae)");
}

Json grid_json(const GridSpec& g, ModelVariant v) {
  Json j = to_json(g);
  if (v != ModelVariant::SPHM1) j.erase("alphas");
  return j;
}

std::string stem_of(const std::string& path) { return std::filesystem::path(path).stem().string(); }

std::filesystem::path sidecar(const std::string& model_path, std::string_view kind) {
  return model_path + "." + std::string(kind) + ".map";
}

/// Original id -> dense index; when no map exists ids are dense indices.
class IdLookup {
 public:
  IdLookup(const std::vector<std::string>& ids, std::size_t count) : count_(count), has_map_(!ids.empty()) {
    for (std::size_t i = 0; i < ids.size(); ++i) index_.emplace(ids[i], i);
  }
  std::optional<std::size_t> find(const std::string& id) const {
    if (has_map_) {
      const auto it = index_.find(id);
      if (it == index_.end()) return std::nullopt;
      return it->second;
    }
    std::size_t v = 0;
    const auto [p, ec] = std::from_chars(id.data(), id.data() + id.size(), v);
    if (ec != std::errc() || p != id.data() + id.size() || v >= count_) return std::nullopt;
    return v;
  }

 private:
  std::size_t count_;
  bool has_map_;
  std::map<std::string, std::size_t> index_;
};

std::vector<std::string> maybe_read_map(const std::filesystem::path& p) {
  if (!std::filesystem::exists(p)) return {};
  return read_id_map(p);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Similarity-popularity embeddings for rating prediction"};
  app.require_subcommand(1);
  app.fallthrough();
  app.failure_message(CLI::FailureMessage::help);

  Shared sh;
  app.add_option("--seed", sh.seed, "seed for every random substream")->envname("SPREC_SEED")->capture_default_str();
  app.add_option("--threads", sh.threads, "OpenMP threads (0: available parallelism)")
      ->envname("SPREC_THREADS")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--deterministic", sh.deterministic,
                 "fixed-order reductions so results do not depend on thread count")
      ->envname("SPREC_DETERMINISTIC")
      ->capture_default_str();
  app.add_option("--p-min", sh.p_min, "lower end of the scaled rating range")->envname("SPREC_P_MIN")->capture_default_str();
  app.add_option("--p-max", sh.p_max, "upper end of the scaled rating range")->envname("SPREC_P_MAX")->capture_default_str();
  app.add_option("--scale", sh.scale, "declared rating scale r_min:r_max (default: observed)")->envname("SPREC_SCALE");
  app.add_option("--delimiter", sh.delimiter, "auto, comma, tab, whitespace, or double-colon")
      ->envname("SPREC_DELIMITER")
      ->capture_default_str();
  app.add_option("--report", sh.report_path, "write the structured JSON report here");
  app.add_flag("--quiet", sh.quiet, "suppress progress messages");

  std::size_t min_user_ratings = 5;

  // ingest
  auto* ingest_cmd = app.add_subcommand("ingest", "Load a ratings file and summarize it");
  std::string ingest_input, ingest_maps;
  ingest_cmd->add_option("input", ingest_input, "ratings file")->required();
  ingest_cmd->add_option("--id-maps", ingest_maps, "write <prefix>.users.map and <prefix>.items.map");
  ingest_cmd->add_option("--min-user-ratings", min_user_ratings)->capture_default_str();

  // train
  auto* train_cmd = app.add_subcommand("train", "Fit an embedding on a ratings file");
  std::string train_input, train_output;
  ModelFlags train_flags;
  train_cmd->add_option("input", train_input, "ratings file")->required();
  train_cmd->add_option("-o,--output", train_output, "model file")->required();
  train_cmd->add_option("--min-user-ratings", min_user_ratings)->capture_default_str();
  add_model_flags(train_cmd, train_flags);

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "Predict ratings with a saved model");
  std::string predict_model, predict_user, predict_item, predict_pairs, predict_output;
  predict_cmd->add_option("-m,--model-file", predict_model, "model file")->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--user", predict_user, "user id");
  predict_cmd->add_option("--item", predict_item, "item id");
  predict_cmd->add_option("--pairs", predict_pairs, "file of 'user item' lines")->check(CLI::ExistingFile);
  predict_cmd->add_option("-o,--output", predict_output, "write predictions here instead of stdout");

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "Cross-validated protocol for one method");
  std::string eval_input, eval_name;
  ModelFlags eval_flags;
  GridFlags eval_grid;
  std::size_t folds = 5, knn_k = kDefaultNeighbors;
  double validation_fraction = 0.1;
  bool allow_fold_failure = false;
  eval_cmd->add_option("input", eval_input, "ratings file")->required();
  eval_cmd->add_option("--name", eval_name, "dataset name in the report (default: file stem)");
  eval_cmd->add_option("--folds", folds)->capture_default_str();
  eval_cmd->add_option("--validation-fraction", validation_fraction)->capture_default_str();
  eval_cmd->add_option("--k", knn_k, "neighbors for --model itemknn")->capture_default_str();
  eval_cmd->add_option("--min-user-ratings", min_user_ratings)->capture_default_str();
  eval_cmd->add_flag("--allow-fold-failure", allow_fold_failure, "record failing folds and continue");
  add_model_flags(eval_cmd, eval_flags);
  add_grid_flags(eval_cmd, eval_grid);

  // gridsearch
  auto* grid_cmd = app.add_subcommand("gridsearch", "Grid search on a holdout split");
  std::string grid_input, grid_output;
  ModelFlags grid_flags;
  GridFlags grid_grid;
  double holdout = 0.1;
  grid_cmd->add_option("input", grid_input, "ratings file")->required();
  grid_cmd->add_option("--holdout", holdout, "validation fraction")->capture_default_str();
  grid_cmd->add_option("-o,--output", grid_output, "also train the best cell on all ratings and save it");
  grid_cmd->add_option("--min-user-ratings", min_user_ratings)->capture_default_str();
  add_model_flags(grid_cmd, grid_flags);
  add_grid_flags(grid_cmd, grid_grid);

  // rank
  auto* rank_cmd = app.add_subcommand("rank", "Mean rank of methods across datasets");
  std::vector<std::string> rank_tables, rank_reports;
  std::string rank_metric = "rmse", rank_output;
  rank_cmd->add_option("--table", rank_tables, "metric table (dataset,method... header)")->check(CLI::ExistingFile);
  rank_cmd->add_option("--from-report", rank_reports, "evaluate report to merge")->check(CLI::ExistingFile);
  rank_cmd->add_option("--metric", rank_metric, "metric taken from reports")->capture_default_str();
  rank_cmd->add_option("-o,--output", rank_output, "write the rank table here");

  // netgen
  auto* net_cmd = app.add_subcommand("netgen", "Generate a synthetic ring network");
  NetGenConfig net;
  std::string net_output;
  net_cmd->add_option("-o,--output", net_output, "writes <prefix>.edges and <prefix>.nodes")->required();
  net_cmd->add_option("--nodes", net.nodes)->capture_default_str();
  net_cmd->add_option("--gamma", net.gamma)->capture_default_str();
  net_cmd->add_option("--alpha", net.alpha)->capture_default_str();
  net_cmd->add_option("--circumference", net.circumference, "0: one unit per node")->capture_default_str();
  net_cmd->add_option("--kappa-min", net.kappa_min)->capture_default_str();
  net_cmd->add_option("--mean-degree", net.mean_degree)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  if (sh.threads > 0) omp_set_num_threads(sh.threads);
  const auto start = std::chrono::system_clock::now();
  Report report;
  auto progress = [&](std::string_view msg) {
    if (!sh.quiet) err << msg << '\n';
  };

  try {
    if (*ingest_cmd) {
      report.command = "ingest";
      const auto ds = ingest(ingest_input, ingest_options(sh, min_user_ratings));
      report.config = shared_json(sh);
      report.config["input"] = ingest_input;
      report.config["min_user_ratings"] = min_user_ratings;
      report.results["dataset"] = dataset_json(ds);
      if (!ingest_maps.empty() && ds.ids()) {
        write_id_map(ingest_maps + ".users.map", ds.ids()->users);
        write_id_map(ingest_maps + ".items.map", ds.ids()->items);
      }
      out << ds.n_users() << " users, " << ds.n_items() << " items, " << ds.size() << " ratings\n";
    } else if (*train_cmd) {
      report.command = "train";
      const auto ds = ingest(train_input, ingest_options(sh, min_user_ratings));
      const auto model = ModelKind::parse(train_flags.model, train_flags.alpha);
      const auto cfg = train_config(sh, train_flags);
      report.config = shared_json(sh);
      report.config["input"] = train_input;
      report.config["output"] = train_output;
      report.config["model"] = model.name();
      report.config["train"] = to_json(cfg);
      const auto emb = train(ds, model, cfg);
      save(emb, train_output);
      if (ds.ids()) {
        write_id_map(sidecar(train_output, "users"), ds.ids()->users);
        write_id_map(sidecar(train_output, "items"), ds.ids()->items);
      }
      report.results["dataset"] = dataset_json(ds);
      report.results["provenance"] = to_json(emb.provenance);
      report.results["train_fit"] = to_json(score(emb, ds, [&] {
        std::vector<std::size_t> all(ds.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        return all;
      }()));
    } else if (*predict_cmd) {
      report.command = "predict";
      const auto emb = load(predict_model);
      const IdLookup users(maybe_read_map(sidecar(predict_model, "users")), emb.n_users());
      const IdLookup items(maybe_read_map(sidecar(predict_model, "items")), emb.n_items());
      std::vector<std::pair<std::string, std::string>> pairs;
      if (!predict_pairs.empty()) {
        std::ifstream in(predict_pairs);
        std::string u, v;
        while (in >> u >> v) pairs.emplace_back(u, v);
      }
      if (!predict_user.empty() || !predict_item.empty()) {
        if (predict_user.empty() || predict_item.empty()) throw InvariantError("--user and --item go together");
        pairs.emplace_back(predict_user, predict_item);
      }
      if (pairs.empty()) throw InvariantError("nothing to predict: give --user/--item or --pairs");
      std::ostringstream text;
      std::size_t fallbacks = 0;
      for (const auto& [u, v] : pairs) {
        const auto p = predict(emb, users.find(u), items.find(v));
        if (p.fallback != Fallback::None) ++fallbacks;
        text << u << '\t' << v << '\t' << format_double(p.rating) << '\t' << to_string(p.fallback) << '\n';
      }
      if (predict_output.empty()) {
        out << text.str();
      } else {
        write_file_atomic(predict_output, text.str());
      }
      report.config = shared_json(sh);
      report.config["model_file"] = predict_model;
      report.results["predictions"] = pairs.size();
      report.results["fallbacks"] = fallbacks;
    } else if (*eval_cmd) {
      report.command = "evaluate";
      const auto ds = ingest(eval_input, ingest_options(sh, min_user_ratings));
      const auto plan = make_folds(ds, folds, sh.seed, validation_fraction);
      ProtocolOptions opts;
      opts.allow_fold_failure = allow_fold_failure;
      opts.progress = progress;
      report.config = shared_json(sh);
      report.config["input"] = eval_input;
      report.config["dataset"] = eval_name.empty() ? stem_of(eval_input) : eval_name;
      report.config["folds"] = folds;
      report.config["validation_fraction"] = validation_fraction;
      report.config["min_user_ratings"] = min_user_ratings;
      MetricsReport metrics;
      std::string lowered = eval_flags.model;
      for (auto& c : lowered) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      if (lowered == "itemknn") {
        report.config["method"] = "ItemKNN";
        report.config["k"] = knn_k;
        metrics = run_cv_item_knn(ds, plan, knn_k, opts);
      } else {
        const auto variant = ModelKind::parse(eval_flags.model, eval_flags.alpha).variant();
        const auto cfg = train_config(sh, eval_flags);
        const auto grid = grid_spec(eval_grid, cfg.cost);
        report.config["method"] = method_name(variant, cfg.cost);
        report.config["grid"] = grid_json(grid, variant);
        report.config["train"] = to_json(cfg);
        report.config["train"].erase("dim");
        report.config["train"].erase("lambda");
        metrics = run_cv(ds, variant, grid, plan, cfg, opts);
      }
      report.results["dataset"] = dataset_json(ds);
      report.results["metrics"] = to_json(metrics);
      out << metrics.method << ": rmse=" << format_double(metrics.mean_rmse)
          << " mae=" << format_double(metrics.mean_mae) << '\n';
    } else if (*grid_cmd) {
      report.command = "gridsearch";
      const auto ds = ingest(grid_input, ingest_options(sh, min_user_ratings));
      const auto variant = ModelKind::parse(grid_flags.model, grid_flags.alpha).variant();
      const auto cfg = train_config(sh, grid_flags);
      const auto grid = grid_spec(grid_grid, cfg.cost);
      const auto [train_idx, valid_idx] = holdout_split(ds.size(), holdout, sh.seed);
      report.config = shared_json(sh);
      report.config["input"] = grid_input;
      report.config["holdout"] = holdout;
      report.config["method"] = method_name(variant, cfg.cost);
      report.config["grid"] = grid_json(grid, variant);
      report.config["train"] = to_json(cfg);
      const auto result = grid_search(ds, train_idx, valid_idx, variant, grid, cfg);
      report.results["grid"] = to_json(result);
      const auto& best = result.best_cell();
      if (!grid_output.empty()) {
        const auto emb = train(ds, model_for(variant, best.cell), config_for(cfg, best.cell));
        save(emb, grid_output);
        if (ds.ids()) {
          write_id_map(sidecar(grid_output, "users"), ds.ids()->users);
          write_id_map(sidecar(grid_output, "items"), ds.ids()->items);
        }
        report.config["output"] = grid_output;
      }
      out << "best D=" << best.cell.dim << " lambda=" << format_double(best.cell.lambda);
      if (variant == ModelVariant::SPHM1) out << " alpha=" << format_double(best.cell.alpha);
      out << " " << to_string(grid.selection) << "=" << format_double(best.validation.metric(grid.selection))
          << '\n';
    } else if (*rank_cmd) {
      report.command = "rank";
      if (rank_tables.empty() && rank_reports.empty()) throw InvariantError("rank needs --table or --from-report");
      const auto metric = parse_metric(rank_metric);
      MetricTable table;
      for (const auto& path : rank_tables) {
        std::ifstream in(path);
        if (!in) throw DataError("cannot open " + path);
        table.merge(read_metric_table(in, path));
      }
      for (const auto& path : rank_reports) {
        const auto j = read_report(path);
        const auto& m = j.at("results").at("metrics");
        const auto key = metric == Metric::RMSE ? "mean_rmse" : "mean_mae";
        table.set(j.at("config").at("dataset").get<std::string>(), m.at("method").get<std::string>(),
                  m.at(key).get<double>());
      }
      const auto ranks = mean_rank(table);
      const auto text = format_rank_table(ranks);
      if (!rank_output.empty()) write_file_atomic(rank_output, text);
      out << text;
      report.config = shared_json(sh);
      report.config["tables"] = rank_tables;
      report.config["reports"] = rank_reports;
      report.config["metric"] = std::string(to_string(metric));
      report.results["ranks"] = to_json(ranks);
    } else if (*net_cmd) {
      report.command = "netgen";
      net.seed = sh.seed;
      const auto g = generate(net);
      const auto stats = degree_stats(g);
      std::ostringstream edges, nodes;
      write_edge_list(edges, g);
      write_node_table(nodes, g);
      write_file_atomic(net_output + ".edges", edges.str());
      write_file_atomic(net_output + ".nodes", nodes.str());
      report.config = shared_json(sh);
      report.config["netgen"] = to_json(net);
      report.config["output"] = net_output;
      report.results = {{"mu", g.mu},
                        {"edges", g.edges.size()},
                        {"mean_degree", stats.mean_degree},
                        {"max_degree", stats.max_degree}};
      out << g.size() << " nodes, " << g.edges.size() << " edges, mean degree "
          << format_double(stats.mean_degree) << '\n';
    }
    stamp(report, start);
    if (!sh.report_path.empty()) write_report(report, sh.report_path);
    if (!sh.quiet) out << report.to_text();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace sprec
