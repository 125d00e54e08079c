#include <doctest.h>

#include <cmath>
#include <numbers>

#include <kces/error.hpp>
#include <kces/kernel.hpp>
#include <kces/pseudolabel.hpp>
#include <kces/synthetic.hpp>

#include "helpers.hpp"
#include "oracles/dense_oracle.hpp"

using namespace kces;

TEST_CASE("kernel closed forms") {
  CHECK(std::abs(relu_kernel(1.0) - 0.5) <= 1e-12);
  CHECK(std::abs(relu_kernel(0.0)) <= 1e-12);
  CHECK(std::abs(relu_kernel(0.5) - 1.0 / 6.0) <= 1e-12);
  CHECK(std::abs(relu_kernel(-1.0)) <= 1e-12);
  CHECK(relu_kernel(1.0 + 1e-15) == relu_kernel(1.0));  // clamped
}

TEST_CASE("near-parallel rows keep an accurate angle") {
  RowMatrix x(2, 2);
  const double t = 1e-9;
  x << 1.0, 0.0, std::cos(t), std::sin(t);
  const auto h = kernel_matrix(x);
  const double expected = std::cos(t) * (std::numbers::pi - t) / (2 * std::numbers::pi);
  CHECK(std::abs(h(0, 1) - expected) <= 1e-15);
}

TEST_CASE("Gram matrix invariants and oracle agreement") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Graph g = make_random_graph(24, 0.15, 6, seed);
    const auto xt = aggregate_features(g);
    const auto gm = gram_matrix(xt);
    const auto ref = oracle::gram(oracle::aggregate(g));
    const auto& h = gm.h();
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
      REQUIRE(h(i, i) == 0.5);
      for (Eigen::Index j = 0; j < h.cols(); ++j) {
        REQUIRE(h(i, j) == h(j, i));
        REQUIRE(std::abs(h(i, j)) <= 0.5);
        // arccos amplifies rounding of d by 1 / sqrt(1 - d^2) near |d| = 1.
        const double d = xt.matrix.row(i).dot(xt.matrix.row(j));
        const double tol = 1e-12 + 1e-15 / std::sqrt(std::max(1.0 - d * d, 1e-300));
        REQUIRE(std::abs(h(i, j) - static_cast<double>(ref[i][j])) <= tol);
      }
    }
    const Eigen::MatrixXd l = gm.factor();
    const Eigen::MatrixXd shifted = h + gm.ridge() * Eigen::MatrixXd::Identity(h.rows(), h.cols());
    CHECK((l * l.transpose() - shifted).norm() / h.norm() <= 1e-10);
  }
}

TEST_CASE("minimum eigenvalue examples") {
  SUBCASE("orthonormal rows") {
    const RowMatrix x = RowMatrix::Identity(4, 4);
    const auto gm = gram_matrix(aggregate_features(test::graph(x, {})));
    CHECK(min_eigenvalue(gm) == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("duplicated rows are rank deficient and trigger the ridge") {
    RowMatrix x = test::gaussian_rows(5, 3, 4);
    x.row(3) = x.row(1);
    const auto gm = gram_matrix(aggregate_features(test::graph(x, {})));
    CHECK(std::abs(min_eigenvalue(gm)) <= 1e-10);
    CHECK(gm.ridge_used());
    CHECK(gm.ridge() == doctest::Approx(1e-8 * 0.5));
    CHECK_FALSE(gm.warnings().empty());
  }
  SUBCASE("random unit rows agree with the Jacobi oracle") {
    const RowMatrix x = random_unit_rows(16, 32, 9);
    const auto gm = gram_matrix(aggregate_features(test::graph(x, {})));
    const auto ev = oracle::jacobi_eigenvalues(oracle::from_eigen(gm.h()));
    CHECK(min_eigenvalue(gm) > 0.0);
    CHECK(std::abs(min_eigenvalue(gm) - static_cast<double>(ev.front())) <= 1e-12);
  }
}

TEST_CASE("property: lambda_min positive on random non-parallel features") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t n = 4 + seed % 29;
    const RowMatrix x = random_unit_rows(n, 8, seed);
    REQUIRE(min_eigenvalue(gram_matrix(aggregate_features(test::graph(x, {})))) > 0.0);
  }
}

TEST_CASE("GKC examples") {
  const RowMatrix x = RowMatrix::Identity(6, 6);
  const auto gm = gram_matrix(aggregate_features(test::graph(x, {})));
  LabelMatrix ones;
  ones.columns = Eigen::MatrixXd::Ones(6, 1);
  ones.encoding = LabelEncoding::scalar_truth;
  CHECK(gkc(gm, ones).value == doctest::Approx(4.0).epsilon(1e-14));
  LabelMatrix zero = ones;
  zero.columns.setZero();
  CHECK(gkc(gm, zero).value == 0.0);
  LabelMatrix wrong = ones;
  wrong.columns = Eigen::MatrixXd::Ones(5, 1);
  CHECK_THROWS_AS(gkc(gm, wrong), InputError);
}

TEST_CASE("GKC matches the explicit-inverse oracle") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Graph g = make_random_graph(4 + seed, 0.4, 5, seed);
    const auto p = kmeans_pseudo_labels(g, 2, seed);
    const auto labels = encode_labels(p, LabelEncoding::one_hot);
    const auto value = gkc(gram_matrix(aggregate_features(g)), labels);
    const auto ref = oracle::gkc(g, oracle::columns(labels.columns));
    CHECK(test::rel_err(value.value, static_cast<double>(ref)) <= 1e-10);
    double sum = 0.0;
    for (double c : value.per_column) sum += c;
    CHECK(sum == doctest::Approx(value.value).epsilon(1e-15));
    CHECK(value.value >= 0.0);
  }
}

TEST_CASE("solve_spd examples") {
  const RowMatrix x = RowMatrix::Identity(3, 3);
  const auto gm = gram_matrix(aggregate_features(test::graph(x, {})));
  CHECK(solve_spd(gm, Eigen::Vector3d::Zero()).norm() == 0.0);
  const auto z = solve_spd(gm, Eigen::Vector3d(1, 0, 0));
  CHECK((z - Eigen::Vector3d(2, 0, 0)).norm() <= 1e-14);
  CHECK_THROWS_AS(solve_spd(gm, Eigen::Vector2d(1, 0)), InputError);

  const Graph g = test::path_graph(8, 16, 3);
  const auto gm8 = gram_matrix(aggregate_features(g));
  REQUIRE_FALSE(gm8.ridge_used());
  Eigen::VectorXd rhs = test::gaussian_rows(8, 1, 5).col(0);
  const auto sol = solve_spd(gm8, rhs);
  std::vector<long double> b(rhs.data(), rhs.data() + 8);
  const auto ref = oracle::solve(oracle::from_eigen(gm8.h()), b);
  for (int i = 0; i < 8; ++i) CHECK(std::abs(sol(i) - static_cast<double>(ref[i])) <= 1e-10 * std::max(1.0, std::abs(sol(i))));
}

TEST_CASE("property: GKC is invariant under node relabelling") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Graph g = make_random_graph(14, 0.25, 5, seed);
    const auto labels = encode_labels(kmeans_pseudo_labels(g, 2, seed), LabelEncoding::one_hot);
    std::vector<NodeId> perm(14);
    for (NodeId i = 0; i < 14; ++i) perm[i] = (i * 5 + 3) % 14;
    RowMatrix x(14, g.num_features());
    LabelMatrix permuted = labels;
    for (NodeId i = 0; i < 14; ++i) {
      x.row(perm[i]) = g.features().row(i);
      permuted.columns.row(perm[i]) = labels.columns.row(i);
    }
    std::vector<Edge> edges;
    for (const auto& e : g.edges()) edges.push_back(Edge::canonical(perm[e.u], perm[e.v]));
    const Graph h = Graph::from_pairs(x, edges);
    const double a = gkc(gram_matrix(aggregate_features(g)), labels).value;
    const double b = gkc(gram_matrix(aggregate_features(h)), permuted).value;
    CHECK(test::rel_err(b, a) <= 1e-10);
  }
}

TEST_CASE("binary Gram cache round-trips") {
  const auto dir = test::scratch("gram_bin");
  const auto gm = gram_matrix(aggregate_features(make_random_graph(9, 0.3, 4, 1)));
  write_gram_binary(dir / "h.bin", gm.h());
  CHECK(read_gram_binary(dir / "h.bin") == gm.h());
  CHECK(std::filesystem::file_size(dir / "h.bin") == 12 + 8 * 81);
}
