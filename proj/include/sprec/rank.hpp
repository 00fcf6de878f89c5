#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace sprec {

/// Metric values indexed [dataset][method]; NaN marks a missing entry.
struct MetricTable {
  std::vector<std::string> datasets;
  std::vector<std::string> methods;
  std::vector<std::vector<double>> values;

  /// Inserts or overwrites one entry, growing the table as needed.
  void set(std::string_view dataset, std::string_view method, double value);
  void merge(const MetricTable& other);
};

struct RankTable {
  std::vector<std::string> datasets;
  std::vector<std::string> methods;
  std::vector<std::vector<double>> ranks;  // [dataset][method]
  std::vector<double> mean_rank;           // per method
};

/// Ranks methods within each dataset (lower value is better, 1 is best);
/// tied values share the average of the positions they span. Throws
/// DataError when any entry is missing.
RankTable mean_rank(const MetricTable& table);

/// Reads "dataset<delim>method1<delim>method2..." followed by one row per
/// dataset. Empty cells are missing. Comma, tab, or semicolon delimited.
MetricTable read_metric_table(std::istream& in, std::string_view source);

/// One row per method: method, mean_rank, then the rank on every dataset.
std::string format_rank_table(const RankTable& table, char delimiter = ',');

}  // namespace sprec
