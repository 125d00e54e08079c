#include <doctest.h>

#include <algorithm>
#include <set>

#include <kces/error.hpp>
#include <kces/sanitize.hpp>
#include <kces/synthetic.hpp>

#include "helpers.hpp"

using namespace kces;

namespace {

KcScoreTable table_of(std::vector<std::pair<Edge, double>> scores) {
  KcScoreTable t;
  for (const auto& [e, s] : scores) t.entries[e] = KcEntry{s, 0.0, ScoreMethod::naive};
  return t;
}

KcScoreTable ten_edges() {
  std::vector<std::pair<Edge, double>> s;
  for (NodeId i = 0; i < 10; ++i) s.push_back({{i, i + 1}, static_cast<double>((i * 7) % 10)});
  return table_of(s);
}

}  // namespace

TEST_CASE("prune count uses the ceiling") {
  CHECK(prune_count(0.25, 10) == 3);
  CHECK(prune_count(0.0, 10) == 0);
  CHECK(prune_count(1.0, 10) == 10);
  CHECK(prune_count(0.2, 5) == 1);
  CHECK(prune_count(0.3, 10) == 3);  // 0.3 * 10 = 3.0000000000000004
  CHECK_THROWS_AS(prune_count(1.5, 10), ConfigError);
  CHECK_THROWS_AS(prune_count(-0.1, 10), ConfigError);
}

TEST_CASE("selection strategies") {
  const auto t = ten_edges();
  const auto high = select_edges(t, {0.25, PruneStrategy::high_kc, 0});
  REQUIRE(high.k == 3);
  CHECK(t.entries.at(high.removed[0]).score == 9.0);
  CHECK(t.entries.at(high.removed[1]).score == 8.0);
  CHECK(t.entries.at(high.removed[2]).score == 7.0);
  const auto low = select_edges(t, {0.25, PruneStrategy::low_kc, 0});
  CHECK(t.entries.at(low.removed[0]).score == 0.0);
  CHECK(t.entries.at(low.removed[2]).score == 2.0);
  const auto r1 = select_edges(t, {0.5, PruneStrategy::random, 42});
  const auto r2 = select_edges(t, {0.5, PruneStrategy::random, 42});
  CHECK(r1.removed == r2.removed);
  CHECK(std::set<Edge>(r1.removed.begin(), r1.removed.end()).size() == 5);
  CHECK(select_edges(t, {0.0, PruneStrategy::high_kc, 0}).removed.empty());
}

TEST_CASE("ties break by (u, v) ascending") {
  const auto t = table_of({{{2, 3}, 1.0}, {{0, 5}, 1.0}, {{0, 1}, 1.0}, {{1, 2}, 0.5}});
  const auto high = select_edges(t, {0.5, PruneStrategy::high_kc, 0});
  CHECK(high.removed == std::vector<Edge>{{0, 1}, {0, 5}});
  const auto low = select_edges(t, {0.5, PruneStrategy::low_kc, 0});
  CHECK(low.removed == std::vector<Edge>{{1, 2}, {0, 1}});
}

TEST_CASE("property: at alpha = 1 high and low plans are permutations of E") {
  const auto t = ten_edges();
  auto high = select_edges(t, {1.0, PruneStrategy::high_kc, 0}).removed;
  auto low = select_edges(t, {1.0, PruneStrategy::low_kc, 0}).removed;
  std::sort(high.begin(), high.end());
  std::sort(low.begin(), low.end());
  CHECK(high == low);
  CHECK(high.size() == 10);
}

TEST_CASE("apply_prune") {
  const Graph tri = test::triangle();
  CHECK(apply_prune(tri, PrunePlan{}) == tri);
  PrunePlan all;
  all.removed = tri.edges();
  CHECK(apply_prune(tri, all).num_edges() == 0);
  PrunePlan one;
  one.removed = {{0, 1}};
  CHECK(apply_prune(tri, one).degrees() == std::vector<std::size_t>{2, 2, 3});
  PrunePlan stale;
  stale.removed = {{0, 1}};
  CHECK_THROWS_AS(apply_prune(apply_prune(tri, one), stale), InputError);
}

TEST_CASE("pipeline on the path golden case removes the argmax edge") {
  const Graph g = load_graph(test::data_dir() / "path5_edges.tsv", test::data_dir() / "path5_features.csv");
  PipelineOptions options;
  options.alpha = 0.2;
  options.k_clusters = 2;
  options.method = ScoreMethod::naive;
  const auto result = kces_pipeline(g, options);
  REQUIRE(result.plan.removed.size() == 1);
  CHECK(result.plan.removed.front() == Edge{2, 3});
  CHECK(result.sanitized.num_edges() == 3);

  options.alpha = 0.0;
  CHECK(kces_pipeline(g, options).sanitized == g);
}
