#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace kces {

using NodeId = std::uint32_t;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Undirected edge in canonical orientation (u < v).
struct Edge {
  NodeId u = 0;
  NodeId v = 0;

  static Edge canonical(NodeId a, NodeId b) { return a < b ? Edge{a, b} : Edge{b, a}; }

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Diagnostics collected while reading or building a graph.
struct IngestReport {
  std::size_t duplicate_edges = 0;
  std::size_t self_loops_dropped = 0;
};

/// Node-attributed undirected graph with implicit self-loops.
///
/// Stored edges never include self-loops; every node carries one implicitly, so
/// degree(i) = 1 + |stored edges incident to i| >= 1. Immutable once built.
class Graph {
 public:
  Graph() = default;

  /// Builds a graph from arbitrary-orientation pairs. Self-loops are dropped and
  /// duplicates merged; both are counted in `report` when it is non-null.
  static Graph from_pairs(RowMatrix features, std::span<const Edge> pairs,
                          std::optional<std::vector<int>> labels = std::nullopt,
                          IngestReport* report = nullptr);

  std::size_t num_nodes() const noexcept { return static_cast<std::size_t>(features_.rows()); }
  std::size_t num_features() const noexcept { return static_cast<std::size_t>(features_.cols()); }
  std::size_t num_edges() const noexcept { return edges_.size(); }

  const RowMatrix& features() const noexcept { return features_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::optional<std::vector<int>>& labels() const noexcept { return labels_; }

  /// Degree counting the implicit self-loop.
  std::size_t degree(NodeId i) const { return adjacency_[i].size() + 1; }
  std::vector<std::size_t> degrees() const;

  /// Sorted neighbours of `i`, excluding `i` itself.
  std::span<const NodeId> neighbors(NodeId i) const { return adjacency_[i]; }

  bool has_edge(NodeId a, NodeId b) const;

  Graph with_labels(std::optional<std::vector<int>> labels) const;
  Graph with_edges(std::span<const Edge> pairs) const;

  friend bool operator==(const Graph& a, const Graph& b);

 private:
  RowMatrix features_;
  std::vector<Edge> edges_;  // sorted, unique, u < v
  std::vector<std::vector<NodeId>> adjacency_;
  std::optional<std::vector<int>> labels_;
};

/// Row-normalised aggregated features, one unit-norm row per node.
struct AggregatedFeatures {
  RowMatrix matrix;
  Eigen::VectorXd pre_norm_row_norms;

  std::size_t rows() const noexcept { return static_cast<std::size_t>(matrix.rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(matrix.cols()); }

  /// Restriction to the listed rows, in order.
  AggregatedFeatures select_rows(std::span<const NodeId> rows) const;
};

inline constexpr double kDegenerateRowNorm = 1e-10;

/// Symmetric-normalised propagation D^-1/2 (A + I) D^-1/2 X followed by row
/// renormalisation. Throws NumericError naming the node when a row vanishes.
AggregatedFeatures aggregate_features(const Graph& g);

/// Aggregated, renormalised rows of `g` for the listed nodes only.
RowMatrix aggregate_rows(const Graph& g, std::span<const NodeId> rows,
                         Eigen::VectorXd* pre_norms = nullptr);

/// Copy of `g` without edge (u,v). Throws InputError for self-loops or absent edges.
Graph remove_edge(const Graph& g, NodeId u, NodeId v);

/// N(u) ∪ N(v) ∪ {u, v}, sorted: the rows of the aggregated features that can
/// change when (u,v) is deleted.
std::vector<NodeId> affected_nodes(const Graph& g, NodeId u, NodeId v);

// File formats: edge list = "u<TAB>v" lines with '#' comments; features =
// headerless CSV; labels = one integer per line.

Graph load_graph(const std::filesystem::path& edge_path, const std::filesystem::path& feature_path,
                 const std::optional<std::filesystem::path>& label_path = std::nullopt,
                 IngestReport* report = nullptr);

RowMatrix read_features(const std::filesystem::path& path);
std::vector<Edge> read_edge_pairs(const std::filesystem::path& path);
std::vector<int> read_labels(const std::filesystem::path& path);

void write_edges(const std::filesystem::path& path, std::span<const Edge> edges);
void write_features(const std::filesystem::path& path, const RowMatrix& features);
void write_labels(const std::filesystem::path& path, std::span<const int> labels);

/// Writes edges, features and (when present) labels next to each other.
void save_graph(const Graph& g, const std::filesystem::path& edge_path,
                const std::filesystem::path& feature_path,
                const std::optional<std::filesystem::path>& label_path = std::nullopt);

}  // namespace kces
