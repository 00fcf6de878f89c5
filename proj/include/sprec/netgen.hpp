#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

namespace sprec {

/// Ring (one-dimensional hidden metric space) network generator.
struct NetGenConfig {
  std::size_t nodes = 500;
  double gamma = 2.5;           // power-law exponent of hidden degrees, > 2
  double alpha = 2.0;           // connection decay exponent, > 1
  double circumference = 0.0;   // 0 means one unit of arc per node
  double kappa_min = 1.0;
  double mean_degree = 10.0;    // target expected mean degree
  std::uint64_t seed = 0;

  void validate() const;
  double ring_length() const { return circumference > 0.0 ? circumference : static_cast<double>(nodes); }
};

using Edge = std::pair<std::uint32_t, std::uint32_t>;

struct GeneratedNetwork {
  std::vector<double> positions;  // arc position in [0, circumference)
  std::vector<double> kappas;
  std::vector<Edge> edges;        // u < v, sorted
  double circumference = 0.0;
  double mu = 0.0;                // d_c = mu * kappa * kappa'
  double alpha = 0.0;

  std::size_t size() const noexcept { return kappas.size(); }
};

/// (1 + d / d_c)^-alpha.
double ring_connection_probability(double distance, double characteristic, double alpha);
/// Shorter arc between two positions on a ring.
double ring_distance(double a, double b, double circumference);

/// Expected kappa of the continuous Pareto with exponent gamma.
double pareto_mean(double kappa_min, double gamma);
/// Proportionality constant of d_c that yields the target mean degree on an
/// infinite ring: mean degree = 2 * density * mu * <kappa>^2 / (alpha - 1).
double characteristic_scale(const NetGenConfig& cfg);

/// Positions uniform on the ring, kappas by inverse-CDF Pareto sampling, each
/// pair linked independently. Pair draws for row u come from their own
/// substream, so the result does not depend on the thread count.
GeneratedNetwork generate(const NetGenConfig& cfg);

namespace serial {
GeneratedNetwork generate(const NetGenConfig& cfg);
}  // namespace serial

struct DegreeStats {
  std::vector<std::size_t> degrees;
  std::vector<std::size_t> histogram;  // histogram[k] = nodes of degree k
  std::size_t max_degree = 0;
  double mean_degree = 0.0;
};

DegreeStats degree_stats(std::size_t nodes, const std::vector<Edge>& edges);
inline DegreeStats degree_stats(const GeneratedNetwork& net) { return degree_stats(net.size(), net.edges); }

/// "u v" per line.
void write_edge_list(std::ostream& out, const GeneratedNetwork& net);
/// "id position kappa" per line.
void write_node_table(std::ostream& out, const GeneratedNetwork& net);

}  // namespace sprec
