#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "kces/graph.hpp"
#include "kces/kernel.hpp"
#include "kces/pseudolabel.hpp"

namespace kces {

enum class ScoreMethod { naive, fast };

std::string_view to_string(ScoreMethod method);
ScoreMethod parse_score_method(std::string_view text);

struct KcEntry {
  double score = 0.0;        // |base_gkc - gkc_removed|
  double gkc_removed = 0.0;  // complexity of the graph without this edge
  ScoreMethod method = ScoreMethod::naive;
  bool ridge_used = false;   // the reduced Gram matrix needed a ridge
};

/// Per-edge kernel complexity scores of one graph under one label matrix.
struct KcScoreTable {
  std::map<Edge, KcEntry> entries;
  double base_gkc = 0.0;
  std::string label_digest;
  bool ridge_used = false;
  /// Fast-path edges that were recomputed naively.
  std::size_t fallback_count = 0;

  /// Entries whose reduced Gram matrix needed a ridge.
  std::size_t ridged_edges() const;

  /// Edges by score descending, ties by (u, v) ascending.
  std::vector<std::pair<Edge, KcEntry>> ranked() const;
};

/// |GKC(g) - GKC(g without (u,v))| by recomputing everything from scratch.
double kc_score_naive(const Graph& g, const LabelMatrix& labels, NodeId u, NodeId v);

/// GKC of `g` with (u,v) deleted, recomputed from scratch.
GkcValue gkc_without_edge(const Graph& g, const LabelMatrix& labels, NodeId u, NodeId v);

/// Base-graph state shared by all low-rank edge updates.
///
/// Deleting (u,v) only changes aggregated rows in S = affected_nodes(u,v), so
/// the Gram matrix moves by a perturbation supported on the rows and columns
/// of S. Writing it as U C U^T with U = [P_S, R] (R = the changed columns)
/// gives the complexity of the reduced graph from H^-1 through Woodbury's
/// identity, with a 2|S| x 2|S| capacitance system per edge.
class FastScoringCache {
 public:
  FastScoringCache(const Graph& g, const LabelMatrix& labels);

  const Graph& graph() const noexcept { return graph_; }
  const LabelMatrix& labels() const noexcept { return labels_; }
  const AggregatedFeatures& features() const noexcept { return xt_; }
  const GramMatrix& gram() const noexcept { return gram_; }
  const GkcValue& base() const noexcept { return base_; }

  /// Score of (u,v); exact naive recomputation whenever the low-rank update is
  /// unusable (ridged base or capacitance condition > 1e12).
  KcEntry score(NodeId u, NodeId v) const;

  std::size_t fallback_count() const noexcept { return fallbacks_.load(); }

 private:
  Graph graph_;
  LabelMatrix labels_;
  AggregatedFeatures xt_;
  GramMatrix gram_;
  Eigen::MatrixXd inverse_;  // H^-1 from the cached factor
  Eigen::MatrixXd solves_;   // H^-1 y_c
  GkcValue base_;
  mutable std::atomic<std::size_t> fallbacks_{0};
};

inline constexpr double kMaxCapacitanceCondition = 1e12;

double kc_score_fast(const FastScoringCache& cache, NodeId u, NodeId v);

/// Scores every edge of `g`. The table is identical for any thread count.
KcScoreTable kc_scores_all(const Graph& g, const LabelMatrix& labels, ScoreMethod method,
                           unsigned threads = 1);

/// TSV export "u<TAB>v<TAB>kc_score<TAB>method" in ranked order, preceded by
/// '#' metadata lines.
void write_scores(const std::filesystem::path& path, const KcScoreTable& table);
KcScoreTable read_scores(const std::filesystem::path& path);

}  // namespace kces
