#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include <kces/graph.hpp>
#include <kces/random.hpp>

namespace test {

inline std::filesystem::path data_dir() { return KCES_TEST_DATA_DIR; }

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("kces_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

/// |a - b| <= rel * |b|, or <= abs_tol when b is near zero.
inline bool close(double a, double b, double rel, double abs_tol) {
  return std::abs(a - b) <= std::max(rel * std::abs(b), abs_tol);
}

inline kces::RowMatrix gaussian_rows(std::size_t n, std::size_t f, std::uint64_t seed) {
  kces::Rng rng(seed);
  kces::RowMatrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(f));
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = kces::standard_normal(rng);
  return x;
}

inline kces::Graph graph(kces::RowMatrix x, std::vector<kces::Edge> edges) {
  return kces::Graph::from_pairs(std::move(x), edges);
}

inline kces::Graph path_graph(std::size_t n, std::size_t f = 4, std::uint64_t seed = 1) {
  std::vector<kces::Edge> edges;
  for (kces::NodeId i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
  return graph(gaussian_rows(n, f, seed), edges);
}

inline kces::Graph triangle(std::size_t f = 3, std::uint64_t seed = 2) {
  return graph(gaussian_rows(3, f, seed), {{0, 1}, {1, 2}, {0, 2}});
}

}  // namespace test
