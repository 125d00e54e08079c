#include "kces/synthetic.hpp"

#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "kces/error.hpp"
#include "kces/random.hpp"

namespace kces {
namespace {

std::vector<Edge> sample_edges(std::size_t n, Rng& rng, auto probability) {
  std::vector<Edge> edges;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      if (uniform01(rng) < probability(i, j)) edges.push_back({i, j});
    }
  }
  return edges;
}

}  // namespace

Graph make_sbm(const SbmConfig& cfg) {
  if (cfg.nodes == 0 || cfg.classes < 1 || cfg.features == 0) throw ConfigError("SBM needs nodes, classes and features");
  if (!(cfg.p_in >= 0.0 && cfg.p_in <= 1.0 && cfg.p_out >= 0.0 && cfg.p_out <= 1.0)) {
    throw ConfigError("SBM probabilities must lie in [0, 1]");
  }
  std::vector<int> labels(cfg.nodes);
  for (std::size_t i = 0; i < cfg.nodes; ++i) {
    labels[i] = static_cast<int>(i * static_cast<std::size_t>(cfg.classes) / cfg.nodes);
  }
  Rng edge_rng(derive_seed(cfg.seed, 0));
  auto edges = sample_edges(cfg.nodes, edge_rng,
                            [&](NodeId i, NodeId j) { return labels[i] == labels[j] ? cfg.p_in : cfg.p_out; });

  Rng feature_rng(derive_seed(cfg.seed, 1));
  const auto f = static_cast<Eigen::Index>(cfg.features);
  RowMatrix centres = random_unit_rows(static_cast<std::size_t>(cfg.classes), cfg.features, derive_seed(cfg.seed, 2));
  RowMatrix x(static_cast<Eigen::Index>(cfg.nodes), f);
  const double noise = 1.0 / std::sqrt(static_cast<double>(cfg.features));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < f; ++j) {
      x(i, j) = cfg.signal * centres(labels[static_cast<std::size_t>(i)], j) + noise * standard_normal(feature_rng);
    }
  }
  return Graph::from_pairs(std::move(x), edges, std::move(labels));
}

Graph make_random_graph(std::size_t nodes, double edge_probability, std::size_t features, std::uint64_t seed) {
  Rng rng(seed);
  auto edges = sample_edges(nodes, rng, [&](NodeId, NodeId) { return edge_probability; });
  RowMatrix x(static_cast<Eigen::Index>(nodes), static_cast<Eigen::Index>(features));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = standard_normal(rng);
  }
  return Graph::from_pairs(std::move(x), edges);
}

RowMatrix random_unit_rows(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  RowMatrix x(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = standard_normal(rng);
    x.row(i).normalize();
  }
  return x;
}

}  // namespace kces
