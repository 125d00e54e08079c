#include "kces/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <fmt/os.h>

#include "kces/error.hpp"
#include "kces/random.hpp"

namespace kces {
namespace {

/// Uniform `count`-subset of the node pairs accepted by `valid`. Rejection
/// sampling when valid pairs are plentiful, explicit enumeration otherwise.
template <typename Valid>
std::vector<Edge> sample_pairs(std::size_t n, std::size_t count, Valid valid, Rng& rng, std::string_view what) {
  if (count == 0) return {};
  std::size_t available = 0;
  for (NodeId a = 0; a < n; ++a) {
    for (NodeId b = a + 1; b < n; ++b) available += valid(a, b) ? 1 : 0;
  }
  if (available < count) {
    throw ConfigError(fmt::format("infeasible budget: {} {} requested, only {} available", count, what, available));
  }
  const std::size_t total = n * (n - 1) / 2;
  if (available * 8 >= total) {
    std::set<Edge> picked;
    std::vector<Edge> order;
    while (order.size() < count) {
      const auto a = static_cast<NodeId>(uniform_index(rng, n));
      const auto b = static_cast<NodeId>(uniform_index(rng, n));
      if (a == b) continue;
      const auto e = Edge::canonical(a, b);
      if (!valid(e.u, e.v) || !picked.insert(e).second) continue;
      order.push_back(e);
    }
    return order;
  }
  std::vector<Edge> pool;
  pool.reserve(available);
  for (NodeId a = 0; a < n; ++a) {
    for (NodeId b = a + 1; b < n; ++b) {
      if (valid(a, b)) pool.push_back({a, b});
    }
  }
  return sample_without_replacement(std::move(pool), count, rng);
}

std::vector<Edge> sample_edges(const std::vector<Edge>& edges, std::size_t count, Rng& rng, std::string_view what) {
  if (edges.size() < count) {
    throw ConfigError(fmt::format("infeasible budget: {} {} requested, only {} available", count, what, edges.size()));
  }
  return sample_without_replacement(edges, count, rng);
}

AttackResult finish(const Graph& g, PerturbationRecord record) {
  std::sort(record.added.begin(), record.added.end());
  std::sort(record.removed.begin(), record.removed.end());
  Graph attacked = apply_record(g, record);
  return {std::move(attacked), std::move(record)};
}

}  // namespace

std::string_view to_string(AttackKind kind) { return kind == AttackKind::random ? "random" : "dice"; }

AttackKind parse_attack_kind(std::string_view text) {
  if (text == "random") return AttackKind::random;
  if (text == "dice") return AttackKind::dice;
  throw ConfigError(fmt::format("unknown attack kind '{}'", text));
}

std::size_t attack_budget(double budget_ratio, std::size_t num_edges) {
  if (!(budget_ratio > 0.0 && budget_ratio <= 1.0)) {
    throw ConfigError(fmt::format("budget ratio {} outside (0, 1]", budget_ratio));
  }
  return static_cast<std::size_t>(std::llround(budget_ratio * static_cast<double>(num_edges)));
}

AttackResult random_attack(const Graph& g, double budget_ratio, std::uint64_t seed, double add_fraction) {
  if (!(add_fraction >= 0.0 && add_fraction <= 1.0)) {
    throw ConfigError(fmt::format("add fraction {} outside [0, 1]", add_fraction));
  }
  PerturbationRecord record;
  record.kind = AttackKind::random;
  record.seed = seed;
  record.budget = attack_budget(budget_ratio, g.num_edges());
  const auto adds = static_cast<std::size_t>(std::llround(add_fraction * static_cast<double>(record.budget)));
  Rng rng(seed);
  record.added = sample_pairs(
      g.num_nodes(), adds, [&](NodeId a, NodeId b) { return !g.has_edge(a, b); }, rng, "non-edges");
  record.removed = sample_edges(g.edges(), record.budget - adds, rng, "edges");
  return finish(g, std::move(record));
}

AttackResult dice_attack(const Graph& g, std::span<const int> labels, double budget_ratio, std::uint64_t seed,
                         std::string label_source) {
  if (labels.size() != g.num_nodes()) {
    throw InputError(fmt::format("DICE needs {} labels, got {}", g.num_nodes(), labels.size()));
  }
  PerturbationRecord record;
  record.kind = AttackKind::dice;
  record.seed = seed;
  record.label_source = std::move(label_source);
  record.budget = attack_budget(budget_ratio, g.num_edges());
  const std::size_t adds = (record.budget + 1) / 2;
  const std::size_t deletes = record.budget / 2;

  Rng rng(seed);
  std::vector<Edge> internal;
  for (const auto& e : g.edges()) {
    if (labels[e.u] == labels[e.v]) internal.push_back(e);
  }
  record.removed = sample_edges(internal, deletes, rng, "same-label edges");
  record.added = sample_pairs(
      g.num_nodes(), adds, [&](NodeId a, NodeId b) { return labels[a] != labels[b] && !g.has_edge(a, b); }, rng,
      "cross-label non-edges");
  return finish(g, std::move(record));
}

Graph apply_record(const Graph& g, const PerturbationRecord& record) {
  std::set<Edge> edges(g.edges().begin(), g.edges().end());
  for (const auto& e : record.removed) {
    if (edges.erase(e) == 0) throw InputError(fmt::format("record removes ({}, {}), which is not an edge", e.u, e.v));
  }
  for (const auto& e : record.added) {
    if (e.u >= e.v || e.v >= g.num_nodes()) throw InputError(fmt::format("record adds invalid pair ({}, {})", e.u, e.v));
    if (g.has_edge(e.u, e.v) || !edges.insert(e).second) {
      throw InputError(fmt::format("record adds ({}, {}), which is already an edge", e.u, e.v));
    }
  }
  const std::vector<Edge> out(edges.begin(), edges.end());
  return g.with_edges(out);
}

Graph revert_record(const Graph& g, const PerturbationRecord& record) {
  PerturbationRecord inverse = record;
  std::swap(inverse.added, inverse.removed);
  return apply_record(g, inverse);
}

void write_record(const std::filesystem::path& path, const PerturbationRecord& record) {
  auto out = fmt::output_file(path.string());
  out.print("# kind\t{}\n", to_string(record.kind));
  out.print("# budget\t{}\n", record.budget);
  out.print("# seed\t{}\n", record.seed);
  if (!record.label_source.empty()) out.print("# labels\t{}\n", record.label_source);
  for (const auto& e : record.added) out.print("+\t{}\t{}\n", e.u, e.v);
  for (const auto& e : record.removed) out.print("-\t{}\t{}\n", e.u, e.v);
}

PerturbationRecord read_record(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open '{}'", path.string()));
  PerturbationRecord record;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string head;
    fields >> head;
    if (head == "#") {
      std::string key, value;
      fields >> key >> value;
      if (key == "kind") record.kind = parse_attack_kind(value);
      if (key == "budget") record.budget = std::stoull(value);
      if (key == "seed") record.seed = std::stoull(value);
      if (key == "labels") record.label_source = value;
      continue;
    }
    long long u = -1, v = -1;
    if ((head != "+" && head != "-") || !(fields >> u >> v) || u < 0 || v < 0) {
      throw InputError(fmt::format("{}:{}: malformed record line", path.string(), line_no));
    }
    const auto e = Edge::canonical(static_cast<NodeId>(u), static_cast<NodeId>(v));
    (head == "+" ? record.added : record.removed).push_back(e);
  }
  std::sort(record.added.begin(), record.added.end());
  std::sort(record.removed.begin(), record.removed.end());
  return record;
}

}  // namespace kces
