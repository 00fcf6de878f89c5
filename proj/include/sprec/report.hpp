#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "sprec/dataset.hpp"
#include "sprec/netgen.hpp"
#include "sprec/protocol.hpp"
#include "sprec/rank.hpp"
#include "sprec/trainer.hpp"

namespace sprec {

using Json = nlohmann::ordered_json;

Json to_json(const RatingScale& s);
Json to_json(const OptimizerConfig& c);
Json to_json(const TrainConfig& c);
Json to_json(const GridSpec& g);
Json to_json(const EvalScore& s);
Json to_json(const GridResult& g);
Json to_json(const FoldResult& f);
Json to_json(const MetricsReport& r);
Json to_json(const RankTable& t);
Json to_json(const NetGenConfig& c);
Json to_json(const Provenance& p);

/// Structured run report. "config" and "results" are reproducible from the
/// seed; wall-clock data is isolated under "run".
struct Report {
  std::string command;
  Json config = Json::object();
  Json results = Json::object();
  Json run = Json::object();

  Json to_json() const;
  /// Same document without the "run" section.
  Json reproducible() const;
  /// Dotted key=value lines for every leaf of config and results.
  std::string to_text() const;
};

/// Stamps "run" with an ISO-8601 UTC start time and the elapsed seconds.
void stamp(Report& report, std::chrono::system_clock::time_point start);

/// Flattens nested objects and arrays into "a.b.0=value" lines.
std::string flatten(const Json& j, std::string_view prefix = "");

void write_report(const Report& report, const std::filesystem::path& path);
Json read_report(const std::filesystem::path& path);

}  // namespace sprec
