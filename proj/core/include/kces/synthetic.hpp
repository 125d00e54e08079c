#pragma once

#include <cstddef>
#include <cstdint>

#include "kces/graph.hpp"

namespace kces {

/// Stochastic block model with Gaussian class-centred features:
/// x_i = signal * c_{y_i} + N(0, I / F), c_k random unit vectors.
struct SbmConfig {
  std::size_t nodes = 200;
  int classes = 2;
  double p_in = 0.1;
  double p_out = 0.01;
  std::size_t features = 32;
  double signal = 0.3;
  std::uint64_t seed = 0;
};

/// Class of node i is floor(i * classes / nodes); labels are attached.
Graph make_sbm(const SbmConfig& cfg);

/// Erdos-Renyi graph with i.i.d. standard normal features, no labels.
Graph make_random_graph(std::size_t nodes, double edge_probability, std::size_t features, std::uint64_t seed);

/// Rows drawn uniformly from the unit sphere.
RowMatrix random_unit_rows(std::size_t rows, std::size_t cols, std::uint64_t seed);

}  // namespace kces
