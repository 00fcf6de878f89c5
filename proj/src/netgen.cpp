#include "sprec/netgen.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "sprec/error.hpp"
#include "sprec/io.hpp"
#include "sprec/random.hpp"

namespace sprec {

void NetGenConfig::validate() const {
  if (nodes < 2) throw InvariantError("netgen needs at least 2 nodes");
  if (!(gamma > 2.0)) throw InvariantError("netgen requires gamma > 2");
  if (!(alpha > 1.0)) throw InvariantError("netgen requires alpha > 1");
  if (!(kappa_min > 0.0)) throw InvariantError("netgen requires kappa_min > 0");
  if (!(mean_degree > 0.0)) throw InvariantError("netgen requires a positive mean degree");
  if (circumference < 0.0) throw InvariantError("circumference must be >= 0");
}

double ring_connection_probability(double distance, double characteristic, double alpha) {
  return std::pow(1.0 + distance / characteristic, -alpha);
}

double ring_distance(double a, double b, double circumference) {
  const double d = std::abs(a - b);
  return std::min(d, circumference - d);
}

double pareto_mean(double kappa_min, double gamma) { return kappa_min * (gamma - 1.0) / (gamma - 2.0); }

double characteristic_scale(const NetGenConfig& cfg) {
  const double density = static_cast<double>(cfg.nodes) / cfg.ring_length();
  const double mean_kappa = pareto_mean(cfg.kappa_min, cfg.gamma);
  return cfg.mean_degree * (cfg.alpha - 1.0) / (2.0 * density * mean_kappa * mean_kappa);
}

namespace {

GeneratedNetwork place_nodes(const NetGenConfig& cfg) {
  cfg.validate();
  GeneratedNetwork net;
  net.circumference = cfg.ring_length();
  net.mu = characteristic_scale(cfg);
  net.alpha = cfg.alpha;
  Rng pos_rng(cfg.seed, "netgen-positions");
  Rng kappa_rng(cfg.seed, "netgen-degrees");
  net.positions.resize(cfg.nodes);
  net.kappas.resize(cfg.nodes);
  const double tail = -1.0 / (cfg.gamma - 1.0);
  for (std::size_t i = 0; i < cfg.nodes; ++i) {
    net.positions[i] = pos_rng.uniform() * net.circumference;
    // 1 - U lies in (0, 1], keeping kappa finite.
    net.kappas[i] = cfg.kappa_min * std::pow(1.0 - kappa_rng.uniform(), tail);
  }
  return net;
}

void sample_row(const GeneratedNetwork& net, std::uint64_t seed, std::size_t u, std::vector<Edge>& out) {
  Rng rng(seed, "netgen-pairs", u);
  const std::size_t n = net.size();
  for (std::size_t v = u + 1; v < n; ++v) {
    const double d = ring_distance(net.positions[u], net.positions[v], net.circumference);
    const double p = ring_connection_probability(d, net.mu * net.kappas[u] * net.kappas[v], net.alpha);
    if (rng.uniform() < p) out.emplace_back(static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v));
  }
}

}  // namespace

GeneratedNetwork generate(const NetGenConfig& cfg) {
  auto net = place_nodes(cfg);
  const std::size_t n = net.size();
  std::vector<std::vector<Edge>> rows(n);
#pragma omp parallel for schedule(dynamic, 8)
  for (std::size_t u = 0; u < n; ++u) sample_row(net, cfg.seed, u, rows[u]);
  std::size_t total = 0;
  for (const auto& r : rows) total += r.size();
  net.edges.reserve(total);
  for (const auto& r : rows) net.edges.insert(net.edges.end(), r.begin(), r.end());
  return net;
}

namespace serial {

GeneratedNetwork generate(const NetGenConfig& cfg) {
  auto net = place_nodes(cfg);
  for (std::size_t u = 0; u < net.size(); ++u) sample_row(net, cfg.seed, u, net.edges);
  return net;
}

}  // namespace serial

DegreeStats degree_stats(std::size_t nodes, const std::vector<Edge>& edges) {
  DegreeStats s;
  s.degrees.assign(nodes, 0);
  for (const auto& [u, v] : edges) {
    if (u >= nodes || v >= nodes) throw InvariantError("edge references a missing node");
    ++s.degrees[u];
    ++s.degrees[v];
  }
  s.max_degree = nodes ? *std::max_element(s.degrees.begin(), s.degrees.end()) : 0;
  s.histogram.assign(s.max_degree + 1, 0);
  std::size_t sum = 0;
  for (auto d : s.degrees) {
    ++s.histogram[d];
    sum += d;
  }
  s.mean_degree = nodes ? static_cast<double>(sum) / static_cast<double>(nodes) : 0.0;
  return s;
}

void write_edge_list(std::ostream& out, const GeneratedNetwork& net) {
  for (const auto& [u, v] : net.edges) out << u << ' ' << v << '\n';
}

void write_node_table(std::ostream& out, const GeneratedNetwork& net) {
  for (std::size_t i = 0; i < net.size(); ++i) {
    out << i << ' ' << format_double(net.positions[i]) << ' ' << format_double(net.kappas[i]) << '\n';
  }
}

}  // namespace sprec
