#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kces/graph.hpp"

namespace kces {

enum class AttackKind { random, dice };

std::string_view to_string(AttackKind kind);
AttackKind parse_attack_kind(std::string_view text);

/// Ground truth of an attack: which edges were added and removed.
struct PerturbationRecord {
  std::vector<Edge> added;    // sorted
  std::vector<Edge> removed;  // sorted
  std::size_t budget = 0;
  std::uint64_t seed = 0;
  AttackKind kind = AttackKind::random;
  /// "ground-truth" or "pseudo" for DICE, empty for random attacks.
  std::string label_source;
};

struct AttackResult {
  Graph graph;
  PerturbationRecord record;
};

/// Number of modifications for a ratio of the edge count: round(ratio * |E|).
std::size_t attack_budget(double budget_ratio, std::size_t num_edges);

/// round(add_fraction * budget) uniformly drawn non-edges are added and the
/// rest of the budget is spent deleting uniformly drawn edges.
AttackResult random_attack(const Graph& g, double budget_ratio, std::uint64_t seed, double add_fraction = 0.5);

/// Deletes floor(b/2) same-label edges and adds ceil(b/2) cross-label non-edges.
AttackResult dice_attack(const Graph& g, std::span<const int> labels, double budget_ratio, std::uint64_t seed,
                         std::string label_source = "ground-truth");

/// Clean graph -> attacked graph. Throws InputError if the record does not fit g.
Graph apply_record(const Graph& g, const PerturbationRecord& record);
/// Attacked graph -> clean graph.
Graph revert_record(const Graph& g, const PerturbationRecord& record);

/// TSV with one "+" or "-" line per edge: "+<TAB>u<TAB>v".
void write_record(const std::filesystem::path& path, const PerturbationRecord& record);
PerturbationRecord read_record(const std::filesystem::path& path);

}  // namespace kces
