#include "kces/sanitize.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>
#include <fmt/os.h>

#include "kces/error.hpp"
#include "kces/random.hpp"

namespace kces {

std::string_view to_string(PruneStrategy strategy) {
  switch (strategy) {
    case PruneStrategy::high_kc: return "high-kc";
    case PruneStrategy::low_kc: return "low-kc";
    case PruneStrategy::random: return "random";
  }
  return "?";
}

PruneStrategy parse_prune_strategy(std::string_view text) {
  if (text == "high-kc") return PruneStrategy::high_kc;
  if (text == "low-kc") return PruneStrategy::low_kc;
  if (text == "random") return PruneStrategy::random;
  throw ConfigError(fmt::format("unknown pruning strategy '{}'", text));
}

std::size_t prune_count(double alpha, std::size_t num_edges) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError(fmt::format("pruning ratio {} outside [0, 1]", alpha));
  // Guard against alpha * |E| landing a rounding error above an integer.
  const double exact = alpha * static_cast<double>(num_edges);
  const double nearest = std::round(exact);
  const double k = std::abs(exact - nearest) < 1e-9 ? nearest : std::ceil(exact);
  return std::min(num_edges, static_cast<std::size_t>(k));
}

PrunePlan select_edges(const KcScoreTable& table, const PruneConfig& config) {
  PrunePlan plan;
  plan.config = config;
  plan.k = prune_count(config.alpha, table.entries.size());
  if (plan.k == 0) return plan;

  std::vector<std::pair<Edge, double>> items;
  items.reserve(table.entries.size());
  for (const auto& [e, entry] : table.entries) items.emplace_back(e, entry.score);

  switch (config.strategy) {
    case PruneStrategy::high_kc:
      std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
      break;
    case PruneStrategy::low_kc:
      std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
      break;
    case PruneStrategy::random: {
      Rng rng(config.seed);
      items = sample_without_replacement(std::move(items), plan.k, rng);
      break;
    }
  }
  for (std::size_t i = 0; i < plan.k; ++i) plan.removed.push_back(items[i].first);
  return plan;
}

Graph apply_prune(const Graph& g, const PrunePlan& plan) {
  const std::set<Edge> drop(plan.removed.begin(), plan.removed.end());
  if (drop.size() != plan.removed.size()) throw InputError("prune plan lists an edge twice");
  for (const auto& e : drop) {
    if (!g.has_edge(e.u, e.v)) {
      throw InputError(fmt::format("prune plan is stale: edge ({}, {}) is not in the graph", e.u, e.v));
    }
  }
  std::vector<Edge> kept;
  kept.reserve(g.num_edges() - drop.size());
  for (const auto& e : g.edges()) {
    if (!drop.contains(e)) kept.push_back(e);
  }
  return g.with_edges(kept);
}

PipelineResult kces_pipeline(const Graph& g, const PipelineOptions& options) {
  PipelineResult out;
  out.pseudo_labels = kmeans_pseudo_labels(g, options.k_clusters, options.seed, options.restarts);
  const auto labels = encode_labels(out.pseudo_labels, options.encoding);
  if (g.num_edges() == 0) {
    prune_count(options.alpha, 0);
    out.sanitized = g;
    out.plan.config = {options.alpha, PruneStrategy::high_kc, options.seed};
    return out;
  }
  out.scores = kc_scores_all(g, labels, options.method, options.threads);
  out.plan = select_edges(out.scores, {options.alpha, PruneStrategy::high_kc, options.seed});
  out.sanitized = apply_prune(g, out.plan);
  return out;
}

void write_plan(const std::filesystem::path& path, const PrunePlan& plan) {
  auto out = fmt::output_file(path.string());
  out.print("# alpha\t{}\n", plan.config.alpha);
  out.print("# strategy\t{}\n", to_string(plan.config.strategy));
  if (plan.config.strategy == PruneStrategy::random) out.print("# seed\t{}\n", plan.config.seed);
  out.print("# k\t{}\n", plan.k);
  for (const auto& e : plan.removed) out.print("{}\t{}\n", e.u, e.v);
}

}  // namespace kces
