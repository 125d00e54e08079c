#include <doctest.h>

#include <cmath>
#include <fstream>

#include <kces/error.hpp>
#include <kces/graph.hpp>
#include <kces/synthetic.hpp>

#include "helpers.hpp"
#include "oracles/dense_oracle.hpp"

using namespace kces;

TEST_CASE("empty edge file gives self-loop-only graph") {
  const auto dir = test::scratch("graph_empty");
  std::ofstream(dir / "e.tsv") << "# nothing\n";
  std::ofstream(dir / "x.csv") << "1,0\n0,1\n1,1\n";
  const Graph g = load_graph(dir / "e.tsv", dir / "x.csv");
  CHECK(g.num_nodes() == 3);
  CHECK(g.num_edges() == 0);
  CHECK(g.degrees() == std::vector<std::size_t>{1, 1, 1});
}

TEST_CASE("duplicate and reversed edges are merged and counted") {
  const auto dir = test::scratch("graph_dup");
  std::ofstream(dir / "e.tsv") << "0\t1\n0 1\n1\t0\n2\t2\n";
  std::ofstream(dir / "x.csv") << "1,0\n0,1\n1,1\n";
  IngestReport report;
  const Graph g = load_graph(dir / "e.tsv", dir / "x.csv", std::nullopt, &report);
  CHECK(g.num_edges() == 1);
  CHECK(report.duplicate_edges == 2);
  CHECK(report.self_loops_dropped == 1);
  CHECK(g.edges().front() == Edge{0, 1});
}

TEST_CASE("ingestion errors") {
  const auto dir = test::scratch("graph_err");
  std::ofstream(dir / "x.csv") << "1,0\n0,abc\n";
  std::ofstream(dir / "e.tsv") << "0\t5\n";
  std::ofstream(dir / "ok.csv") << "1,0\n0,1\n";
  CHECK_THROWS_AS(load_graph(dir / "e.tsv", dir / "ok.csv"), InputError);
  try {
    read_features(dir / "x.csv");
    FAIL("expected a parse error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
  CHECK_THROWS_AS(load_graph(dir / "missing.tsv", dir / "ok.csv"), InputError);
}

TEST_CASE("Cora-shaped input keeps its counts") {
  // Node and edge counts of the Cora citation graph (largest component), random content.
  const std::size_t n = 2485;
  Rng rng(7);
  std::vector<Edge> edges;
  while (edges.size() < 5069) {
    const auto a = static_cast<NodeId>(uniform_index(rng, n));
    const auto b = static_cast<NodeId>(uniform_index(rng, n));
    if (a == b) continue;
    const auto e = Edge::canonical(a, b);
    if (std::find(edges.begin(), edges.end(), e) == edges.end()) edges.push_back(e);
  }
  const auto dir = test::scratch("graph_cora");
  const Graph g = Graph::from_pairs(test::gaussian_rows(n, 8, 3), edges);
  save_graph(g, dir / "e.tsv", dir / "x.csv");
  const Graph back = load_graph(dir / "e.tsv", dir / "x.csv");
  CHECK(back.num_nodes() == 2485);
  CHECK(back.num_edges() == 5069);
}

TEST_CASE("aggregation examples") {
  SUBCASE("single node") {
    RowMatrix x(1, 2);
    x << 3, 4;
    const auto xt = aggregate_features(test::graph(x, {}));
    CHECK(xt.matrix(0, 0) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(xt.matrix(0, 1) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(xt.pre_norm_row_norms(0) == doctest::Approx(5.0));
  }
  SUBCASE("no edges leaves orthonormal rows unchanged") {
    const RowMatrix x = RowMatrix::Identity(3, 3);
    CHECK((aggregate_features(test::graph(x, {})).matrix - x).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("two-node path") {
    const RowMatrix x = RowMatrix::Identity(2, 2);
    const auto xt = aggregate_features(test::graph(x, {{0, 1}}));
    // T = [[1/2, 1/2], [1/2, 1/2]], so both rows are (1/2, 1/2) before renormalisation.
    for (int i = 0; i < 2; ++i) {
      CHECK(xt.pre_norm_row_norms(i) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
      CHECK(xt.matrix(i, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
      CHECK(xt.matrix(i, 1) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    }
  }
}

TEST_CASE("aggregation matches the dense oracle and yields unit rows") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Graph g = make_random_graph(20, 0.2, 6, seed);
    const auto xt = aggregate_features(g);
    const auto ref = oracle::aggregate(g);
    for (Eigen::Index i = 0; i < xt.matrix.rows(); ++i) {
      CHECK(std::abs(xt.matrix.row(i).norm() - 1.0) <= 1e-12);
      for (Eigen::Index j = 0; j < xt.matrix.cols(); ++j) {
        CHECK(std::abs(xt.matrix(i, j) - static_cast<double>(ref[i][j])) <= 1e-12);
      }
    }
  }
}

TEST_CASE("degenerate aggregated row names the node") {
  RowMatrix x(3, 2);
  x << 1, 0, 0, 0, 0, 1;
  try {
    aggregate_features(test::graph(x, {{0, 2}}));
    FAIL("expected a numeric error");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("node 1") != std::string::npos);
  }
}

TEST_CASE("remove_edge") {
  SUBCASE("two-node path") {
    const Graph g = test::path_graph(2);
    const Graph h = remove_edge(g, 0, 1);
    CHECK(h.num_edges() == 0);
    CHECK(h.degrees() == std::vector<std::size_t>{1, 1});
    CHECK(g.num_edges() == 1);
  }
  SUBCASE("triangle becomes a path") {
    const Graph h = remove_edge(test::triangle(), 1, 0);
    CHECK(h.degrees() == std::vector<std::size_t>{2, 2, 3});
  }
  SUBCASE("errors") {
    const Graph g = test::triangle();
    const Graph h = remove_edge(g, 0, 1);
    CHECK_THROWS_AS(remove_edge(h, 0, 1), InputError);
    CHECK_THROWS_AS(remove_edge(g, 1, 1), InputError);
  }
}

TEST_CASE("affected_nodes examples") {
  CHECK(affected_nodes(test::triangle(), 0, 1) == std::vector<NodeId>{0, 1, 2});
  CHECK(affected_nodes(test::path_graph(4), 0, 1) == std::vector<NodeId>{0, 1, 2});
  const Graph star = test::graph(test::gaussian_rows(6, 3, 4), {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}});
  CHECK(affected_nodes(star, 0, 1) == std::vector<NodeId>{0, 1, 2, 3, 4, 5});
  CHECK_THROWS_AS(affected_nodes(star, 1, 2), InputError);
}

TEST_CASE("property: rows outside the affected set do not move") {
  Rng rng(11);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 8 + uniform_index(rng, 57);
    const Graph g = make_random_graph(n, 0.05 + 0.25 * uniform01(rng), 5, seed);
    if (g.num_edges() == 0) continue;
    const auto base = aggregate_features(g);
    for (const auto& e : g.edges()) {
      const auto s = affected_nodes(g, e.u, e.v);
      const auto after = aggregate_features(remove_edge(g, e.u, e.v));
      for (NodeId i = 0; i < n; ++i) {
        if (std::binary_search(s.begin(), s.end(), i)) continue;
        REQUIRE((after.matrix.row(i) - base.matrix.row(i)).cwiseAbs().maxCoeff() <= 1e-12);
      }
      // aggregate_rows agrees with the full computation on S.
      const RowMatrix partial = aggregate_rows(remove_edge(g, e.u, e.v), s);
      for (std::size_t k = 0; k < s.size(); ++k) {
        REQUIRE((partial.row(static_cast<Eigen::Index>(k)) - after.matrix.row(s[k])).cwiseAbs().maxCoeff() <= 1e-15);
      }
    }
  }
}

TEST_CASE("property: degrees stay positive under repeated deletion") {
  Graph g = make_random_graph(15, 0.4, 3, 5);
  while (g.num_edges() > 0) {
    const auto e = g.edges()[g.num_edges() / 2];
    g = remove_edge(g, e.u, e.v);
    for (auto d : g.degrees()) REQUIRE(d >= 1);
  }
}

TEST_CASE("property: save and load round-trip exactly") {
  const auto dir = test::scratch("graph_roundtrip");
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Graph g = make_random_graph(30, 0.1, 7, seed);
    std::vector<int> labels(30);
    for (int i = 0; i < 30; ++i) labels[i] = i % 3;
    g = g.with_labels(labels);
    save_graph(g, dir / "e.tsv", dir / "x.csv", dir / "y.txt");
    const Graph back = load_graph(dir / "e.tsv", dir / "x.csv", dir / "y.txt");
    CHECK(back == g);
  }
}
