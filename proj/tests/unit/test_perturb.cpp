#include <doctest.h>

#include <algorithm>
#include <set>

#include <kces/error.hpp>
#include <kces/perturb.hpp>
#include <kces/synthetic.hpp>

#include "helpers.hpp"

using namespace kces;

namespace {

Graph hundred_edges() {
  Graph g = make_random_graph(40, 0.2, 3, 1);
  std::vector<Edge> e(g.edges().begin(), g.edges().begin() + 100);
  return g.with_edges(e);
}

void check_record(const Graph& clean, const AttackResult& r) {
  CHECK(r.record.added.size() + r.record.removed.size() == r.record.budget);
  for (const auto& e : r.record.added) CHECK_FALSE(clean.has_edge(e.u, e.v));
  for (const auto& e : r.record.removed) CHECK(clean.has_edge(e.u, e.v));
  CHECK(apply_record(clean, r.record) == r.graph);
  CHECK(revert_record(r.graph, r.record) == clean);
}

}  // namespace

TEST_CASE("random attack budget and split") {
  const Graph g = hundred_edges();
  REQUIRE(g.num_edges() == 100);
  const auto r = random_attack(g, 0.25, 3);
  CHECK(r.record.budget == 25);
  CHECK(r.record.added.size() == 13);  // 12.5 rounds away from zero
  check_record(g, r);
  const auto adds_only = random_attack(g, 0.25, 3, 1.0);
  CHECK(adds_only.record.removed.empty());
  CHECK(adds_only.record.added.size() == 25);
  const auto again = random_attack(g, 0.25, 3);
  CHECK(again.record.added == r.record.added);
  CHECK(again.record.removed == r.record.removed);
  CHECK_THROWS_AS(random_attack(g, 0.0, 1), ConfigError);
}

TEST_CASE("random attack reports infeasible budgets") {
  // Complete graph on 5 nodes has no non-edges to add.
  std::vector<Edge> all;
  for (NodeId a = 0; a < 5; ++a)
    for (NodeId b = a + 1; b < 5; ++b) all.push_back({a, b});
  const Graph k5 = test::graph(test::gaussian_rows(5, 2, 1), all);
  CHECK_THROWS_AS(random_attack(k5, 0.5, 1, 1.0), ConfigError);
}

TEST_CASE("DICE deletes inside classes and connects across") {
  SbmConfig cfg;
  cfg.nodes = 60;
  cfg.p_in = 0.5;
  cfg.p_out = 0.02;
  const Graph g = make_sbm(cfg);
  const auto& y = *g.labels();
  const auto r = dice_attack(g, y, 0.25, 9);
  for (const auto& e : r.record.added) CHECK(y[e.u] != y[e.v]);
  for (const auto& e : r.record.removed) CHECK(y[e.u] == y[e.v]);
  CHECK(r.record.added.size() == (r.record.budget + 1) / 2);
  check_record(g, r);
}

TEST_CASE("DICE odd budget favours an addition") {
  SbmConfig cfg;
  cfg.nodes = 20;
  cfg.p_in = 0.5;
  const Graph g = make_sbm(cfg);
  const double ratio = 1.0 / static_cast<double>(g.num_edges());
  const auto r = dice_attack(g, *g.labels(), ratio, 1);
  CHECK(r.record.budget == 1);
  CHECK(r.record.added.size() == 1);
  CHECK(r.record.removed.empty());
}

TEST_CASE("DICE feasibility errors") {
  const Graph g = test::path_graph(4);
  const std::vector<int> alternating{0, 1, 0, 1};  // no same-label edges
  CHECK_THROWS_AS(dice_attack(g, alternating, 1.0, 1), ConfigError);
  const std::vector<int> short_labels{0, 1};
  CHECK_THROWS_AS(dice_attack(g, short_labels, 0.5, 1), InputError);
}

TEST_CASE("record TSV round-trips") {
  const Graph g = hundred_edges();
  const auto r = random_attack(g, 0.3, 5);
  const auto dir = test::scratch("perturb_tsv");
  write_record(dir / "r.tsv", r.record);
  const auto back = read_record(dir / "r.tsv");
  CHECK(back.added == r.record.added);
  CHECK(back.removed == r.record.removed);
  CHECK(back.budget == r.record.budget);
  CHECK(back.seed == r.record.seed);
  CHECK(apply_record(g, back) == r.graph);
}
