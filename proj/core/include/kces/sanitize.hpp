#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "kces/graph.hpp"
#include "kces/kc_score.hpp"
#include "kces/pseudolabel.hpp"

namespace kces {

enum class PruneStrategy { high_kc, low_kc, random };

std::string_view to_string(PruneStrategy strategy);
PruneStrategy parse_prune_strategy(std::string_view text);

struct PruneConfig {
  double alpha = 0.0;
  PruneStrategy strategy = PruneStrategy::high_kc;
  std::uint64_t seed = 0;  // random strategy only
};

struct PrunePlan {
  std::vector<Edge> removed;  // selection order
  std::size_t k = 0;
  PruneConfig config;
};

/// Number of edges pruned at ratio alpha: ceil(alpha * |E|).
std::size_t prune_count(double alpha, std::size_t num_edges);

/// Picks ceil(alpha |E|) edges from the table. Equal scores are ordered by
/// (u, v) ascending for both the high and the low end.
PrunePlan select_edges(const KcScoreTable& table, const PruneConfig& config);

/// g without the planned edges. Throws InputError if a planned edge is missing.
Graph apply_prune(const Graph& g, const PrunePlan& plan);

struct PipelineOptions {
  double alpha = 0.25;
  int k_clusters = 2;
  std::uint64_t seed = 0;
  ScoreMethod method = ScoreMethod::fast;
  LabelEncoding encoding = LabelEncoding::one_hot;
  int restarts = 10;
  unsigned threads = 1;
};

struct PipelineResult {
  Graph sanitized;
  PseudoLabels pseudo_labels;
  KcScoreTable scores;
  PrunePlan plan;
};

/// Pseudo labels, all-edge scores and high-KC pruning in one call.
PipelineResult kces_pipeline(const Graph& g, const PipelineOptions& options);

/// "u<TAB>v" lines of the removed edges, preceded by '#' config lines.
void write_plan(const std::filesystem::path& path, const PrunePlan& plan);

}  // namespace kces
