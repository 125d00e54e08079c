#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include <kces/error.hpp>
#include <kces/kernel.hpp>
#include <kces/pseudolabel.hpp>
#include <kces/synthetic.hpp>

#include "helpers.hpp"
#include "oracles/dense_oracle.hpp"

using namespace kces;

TEST_CASE("k = 1 puts everything in one cluster") {
  const RowMatrix x = test::gaussian_rows(12, 3, 1);
  const auto p = kmeans(x, 1, 0);
  CHECK(std::all_of(p.assignments.begin(), p.assignments.end(), [](int a) { return a == 0; }));
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const double variance = (x.rowwise() - mean).rowwise().squaredNorm().sum();
  CHECK(p.inertia == doctest::Approx(variance).epsilon(1e-12));
}

TEST_CASE("k = N gives singletons with zero inertia") {
  const RowMatrix x = test::gaussian_rows(7, 3, 2);
  const auto p = kmeans(x, 7, 0);
  CHECK(std::set<int>(p.assignments.begin(), p.assignments.end()).size() == 7);
  CHECK(p.inertia == doctest::Approx(0.0));
}

TEST_CASE("separated blobs match the exhaustive optimum") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    RowMatrix x = 0.01 * test::gaussian_rows(14, 3, seed);
    for (Eigen::Index i = 0; i < 7; ++i) x(i, 0) += 1.0;
    for (Eigen::Index i = 7; i < 14; ++i) x(i, 1) += 1.0;  // orthogonal blobs survive row normalisation
    const Graph g = test::graph(x, {});
    const auto p = kmeans_pseudo_labels(g, 2, seed);
    const auto best = oracle::best_two_clustering(clustering_features(g));
    // Same partition up to relabelling.
    const bool same = std::equal(p.assignments.begin(), p.assignments.end(), best.begin());
    const bool flipped = std::equal(p.assignments.begin(), p.assignments.end(), best.begin(),
                                    [](int a, int b) { return a == 1 - b; });
    CHECK((same || flipped));
    for (int i = 0; i < 7; ++i) CHECK(p.assignments[i] != p.assignments[13 - i]);
  }
}

TEST_CASE("k-means errors") {
  const RowMatrix x = test::gaussian_rows(4, 2, 3);
  CHECK_THROWS_AS(kmeans(x, 5, 0), ConfigError);
  CHECK_THROWS_AS(kmeans(x, 0, 0), ConfigError);
  const RowMatrix same = RowMatrix::Ones(5, 2);
  CHECK_THROWS_AS(kmeans(same, 2, 0), NumericError);
  CHECK_NOTHROW(kmeans(same, 1, 0));
}

TEST_CASE("property: inertia never increases and every cluster is used") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Graph g = make_random_graph(60, 0.05, 5, seed);
    const int k = 2 + static_cast<int>(seed % 5);
    const auto p = kmeans_pseudo_labels(g, k, seed);
    for (std::size_t t = 1; t < p.inertia_trace.size(); ++t) {
      REQUIRE(p.inertia_trace[t] <= p.inertia_trace[t - 1] * (1 + 1e-12) + 1e-15);
    }
    CHECK(std::set<int>(p.assignments.begin(), p.assignments.end()).size() == static_cast<std::size_t>(k));
    const auto q = kmeans_pseudo_labels(g, k, seed);
    CHECK(p.assignments == q.assignments);
    CHECK(p.inertia == q.inertia);
  }
}

TEST_CASE("encoding examples") {
  const std::vector<int> a{0, 1, 0};
  const auto oh = encode_labels(a, 0, LabelEncoding::one_hot);
  REQUIRE(oh.channels() == 2);
  CHECK(oh.columns.col(0) == Eigen::Vector3d(1, 0, 1));
  CHECK(oh.columns.col(1) == Eigen::Vector3d(0, 1, 0));

  const std::vector<int> b{0, 1};
  const auto sb = encode_labels(b, 2, LabelEncoding::signed_binary);
  CHECK(sb.columns.col(0) == Eigen::Vector2d(1, -1));

  const std::vector<int> c{0, 1, 2};
  CHECK_THROWS_AS(encode_labels(c, 3, LabelEncoding::signed_binary), ConfigError);

  const std::vector<double> ok{0.5, -1.0};
  CHECK(encode_scalar_labels(ok).columns(1, 0) == -1.0);
  const std::vector<double> bad{0.5, 1.5};
  CHECK_THROWS_AS(encode_scalar_labels(bad), ConfigError);
}

TEST_CASE("property: GKC is invariant to permuting cluster ids") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Graph g = make_random_graph(16, 0.2, 8, seed);
    const auto p = kmeans_pseudo_labels(g, 3, seed);
    const auto gm = gram_matrix(aggregate_features(g));
    const double base = gkc(gm, encode_labels(p, LabelEncoding::one_hot)).value;
    std::vector<int> perm{2, 0, 1};
    std::vector<int> relabelled(p.assignments.size());
    std::transform(p.assignments.begin(), p.assignments.end(), relabelled.begin(), [&](int a) { return perm[a]; });
    const double permuted = gkc(gm, encode_labels(relabelled, 3, LabelEncoding::one_hot)).value;
    CHECK(std::abs(base - permuted) <= 1e-12 * std::max(1.0, base));
  }
}
