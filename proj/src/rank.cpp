#include "sprec/rank.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <sstream>

#include "sprec/error.hpp"
#include "sprec/io.hpp"

namespace sprec {

namespace {

std::size_t index_of(std::vector<std::string>& names, std::string_view name) {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it != names.end()) return static_cast<std::size_t>(it - names.begin());
  names.emplace_back(name);
  return names.size() - 1;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\"");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\"");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, delim)) out.push_back(trim(cell));
  if (!line.empty() && line.back() == delim) out.emplace_back();
  return out;
}

}  // namespace

void MetricTable::set(std::string_view dataset, std::string_view method, double value) {
  const auto d = index_of(datasets, dataset);
  const auto m = index_of(methods, method);
  values.resize(datasets.size());
  for (auto& row : values) row.resize(methods.size(), std::nan(""));
  values[d][m] = value;
}

void MetricTable::merge(const MetricTable& other) {
  for (std::size_t d = 0; d < other.datasets.size(); ++d) {
    for (std::size_t m = 0; m < other.methods.size(); ++m) {
      if (!std::isnan(other.values[d][m])) set(other.datasets[d], other.methods[m], other.values[d][m]);
    }
  }
}

RankTable mean_rank(const MetricTable& table) {
  if (table.datasets.empty() || table.methods.empty()) throw DataError("rank: empty metric table");
  RankTable out;
  out.datasets = table.datasets;
  out.methods = table.methods;
  const auto n_methods = table.methods.size();
  out.mean_rank.assign(n_methods, 0.0);
  for (std::size_t d = 0; d < table.datasets.size(); ++d) {
    const auto& row = table.values.at(d);
    for (std::size_t m = 0; m < n_methods; ++m) {
      if (m >= row.size() || std::isnan(row[m])) {
        throw DataError("rank: missing value for method '" + table.methods[m] + "' on dataset '" +
                        table.datasets[d] + "'");
      }
    }
    std::vector<std::size_t> order(n_methods);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return row[a] < row[b]; });
    std::vector<double> ranks(n_methods);
    for (std::size_t pos = 0; pos < n_methods;) {
      std::size_t end = pos + 1;
      while (end < n_methods && row[order[end]] == row[order[pos]]) ++end;
      // Positions pos..end-1 (0-based) share the average 1-based rank.
      const double shared = 0.5 * static_cast<double>(pos + 1 + end);
      for (std::size_t q = pos; q < end; ++q) ranks[order[q]] = shared;
      pos = end;
    }
    for (std::size_t m = 0; m < n_methods; ++m) out.mean_rank[m] += ranks[m];
    out.ranks.push_back(std::move(ranks));
  }
  for (auto& r : out.mean_rank) r /= static_cast<double>(table.datasets.size());
  return out;
}

MetricTable read_metric_table(std::istream& in, std::string_view source) {
  const std::string src(source);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  char delim = ',';
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || trim(line).front() == '#') continue;
    delim = line.find('\t') != std::string::npos   ? '\t'
            : line.find(';') != std::string::npos  ? ';'
                                                   : ',';
    header = split(line, delim);
    break;
  }
  if (header.size() < 2) throw DataError(src + ": metric table needs a header with methods");
  MetricTable table;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || trim(line).front() == '#') continue;
    const auto cells = split(line, delim);
    if (cells.size() > header.size()) {
      throw DataError(src + ":" + std::to_string(line_no) + ": more cells than header columns");
    }
    if (cells.empty() || cells[0].empty()) {
      throw DataError(src + ":" + std::to_string(line_no) + ": missing dataset name");
    }
    index_of(table.datasets, cells[0]);
    for (std::size_t c = 1; c < header.size(); ++c) {
      double v = std::nan("");
      if (c < cells.size() && !cells[c].empty()) {
        try {
          v = parse_double(cells[c]);
        } catch (const FormatError&) {
          throw DataError(src + ":" + std::to_string(line_no) + ": non-numeric cell '" + cells[c] + "'");
        }
      }
      table.set(cells[0], header[c], v);
    }
  }
  if (table.datasets.empty()) throw DataError(src + ": metric table has no rows");
  return table;
}

std::string format_rank_table(const RankTable& table, char delimiter) {
  std::ostringstream out;
  out << "method" << delimiter << "mean_rank";
  for (const auto& d : table.datasets) out << delimiter << d;
  out << '\n';
  for (std::size_t m = 0; m < table.methods.size(); ++m) {
    out << table.methods[m] << delimiter << format_double(table.mean_rank[m]);
    for (std::size_t d = 0; d < table.datasets.size(); ++d) {
      out << delimiter << format_double(table.ranks[d][m]);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace sprec
