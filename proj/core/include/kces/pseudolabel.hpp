#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "kces/graph.hpp"

namespace kces {

/// K-means cluster assignments used in place of ground-truth labels.
struct PseudoLabels {
  std::vector<int> assignments;  // values in [0, k)
  int k = 0;
  double inertia = 0.0;
  std::uint64_t seed = 0;
  /// Inertia after every Lloyd update of the winning restart.
  std::vector<double> inertia_trace;
};

struct KMeansOptions {
  int max_iterations = 300;
  double tolerance = 1e-6;  // max centroid shift
  int restarts = 10;
};

/// Lloyd's algorithm with k-means++ seeding on the rows of `points`. Returns
/// the restart with the lowest inertia (ties go to the lowest restart index).
PseudoLabels kmeans(const RowMatrix& points, int k, std::uint64_t seed, const KMeansOptions& options = {});

/// Rows of (A + I) X, each divided by its 2-norm: the clustering input.
RowMatrix clustering_features(const Graph& g);

/// Pseudo labels from clustering the adjacency-aggregated features of `g`.
PseudoLabels kmeans_pseudo_labels(const Graph& g, int k, std::uint64_t seed, int restarts = 10);

enum class LabelEncoding { one_hot, signed_binary, scalar_truth };

std::string_view to_string(LabelEncoding encoding);
LabelEncoding parse_label_encoding(std::string_view text);

/// Label vectors as consumed by the kernel complexity functional.
struct LabelMatrix {
  Eigen::MatrixXd columns;  // N x channels, every |entry| <= 1
  LabelEncoding encoding = LabelEncoding::one_hot;

  std::size_t rows() const noexcept { return static_cast<std::size_t>(columns.rows()); }
  std::size_t channels() const noexcept { return static_cast<std::size_t>(columns.cols()); }
};

/// Encodes integer class ids (pseudo or ground truth). `k` is the class count;
/// pass 0 to infer it as max(id) + 1.
LabelMatrix encode_labels(std::span<const int> assignments, int k, LabelEncoding encoding);
LabelMatrix encode_labels(const PseudoLabels& labels, LabelEncoding encoding);

/// Passes real-valued ground-truth labels through as a single column.
LabelMatrix encode_scalar_labels(std::span<const double> values);

/// Hex SHA-256 over the encoding tag and the column data.
std::string label_digest(const LabelMatrix& labels);

}  // namespace kces
