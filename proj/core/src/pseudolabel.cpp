#include "kces/pseudolabel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "kces/digest.hpp"
#include "kces/error.hpp"
#include "kces/random.hpp"

namespace kces {
namespace {

std::size_t count_distinct_rows(const RowMatrix& x, std::size_t stop_at) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(x.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  auto row_less = [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      if (x(a, j) != x(b, j)) return x(a, j) < x(b, j);
    }
    return false;
  };
  std::sort(order.begin(), order.end(), row_less);
  std::size_t distinct = order.empty() ? 0 : 1;
  for (std::size_t i = 1; i < order.size() && distinct < stop_at; ++i) {
    if (row_less(order[i - 1], order[i])) ++distinct;
  }
  return distinct;
}

struct Run {
  std::vector<int> assignments;
  double inertia = 0.0;
  std::vector<double> trace;
};

RowMatrix plus_plus_seeds(const RowMatrix& x, int k, Rng& rng) {
  const auto n = x.rows();
  RowMatrix centers(k, x.cols());
  centers.row(0) = x.row(static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::uint64_t>(n))));
  Eigen::VectorXd d2 = (x.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    const double target = uniform01(rng) * total;
    Eigen::Index pick = n - 1;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      acc += d2[i];
      if (acc > target && d2[i] > 0.0) {
        pick = i;
        break;
      }
    }
    if (d2[pick] == 0.0) {
      // Rounding left `target` at the very end; take the last point with mass.
      for (Eigen::Index i = n - 1; i >= 0; --i) {
        if (d2[i] > 0.0) {
          pick = i;
          break;
        }
      }
    }
    centers.row(c) = x.row(pick);
    d2 = d2.cwiseMin((x.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }
  return centers;
}

Run lloyd(const RowMatrix& x, int k, Rng& rng, const KMeansOptions& options) {
  const auto n = x.rows();
  RowMatrix centers = plus_plus_seeds(x, k, rng);
  Run run;
  run.assignments.assign(static_cast<std::size_t>(n), 0);
  Eigen::VectorXd dist(n);

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    std::vector<Eigen::Index> sizes(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = (x.row(i) - centers.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      run.assignments[static_cast<std::size_t>(i)] = best;
      dist[i] = best_d;
      ++sizes[static_cast<std::size_t>(best)];
    }

    // Re-seed empty clusters with the point farthest from its centroid.
    for (int c = 0; c < k; ++c) {
      if (sizes[static_cast<std::size_t>(c)] != 0) continue;
      Eigen::Index far = -1;
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto owner = static_cast<std::size_t>(run.assignments[static_cast<std::size_t>(i)]);
        if (sizes[owner] > 1 && (far < 0 || dist[i] > dist[far])) far = i;
      }
      auto& owner = run.assignments[static_cast<std::size_t>(far)];
      --sizes[static_cast<std::size_t>(owner)];
      owner = c;
      sizes[static_cast<std::size_t>(c)] = 1;
      dist[far] = 0.0;
    }

    RowMatrix updated = RowMatrix::Zero(k, x.cols());
    for (Eigen::Index i = 0; i < n; ++i) updated.row(run.assignments[static_cast<std::size_t>(i)]) += x.row(i);
    for (int c = 0; c < k; ++c) updated.row(c) /= static_cast<double>(sizes[static_cast<std::size_t>(c)]);

    double inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      inertia += (x.row(i) - updated.row(run.assignments[static_cast<std::size_t>(i)])).squaredNorm();
    }
    run.trace.push_back(inertia);
    run.inertia = inertia;

    const double shift = (updated - centers).rowwise().norm().maxCoeff();
    centers = std::move(updated);
    if (shift < options.tolerance) break;
  }
  return run;
}

}  // namespace

PseudoLabels kmeans(const RowMatrix& points, int k, std::uint64_t seed, const KMeansOptions& options) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (k < 1) throw ConfigError(fmt::format("cluster count must be >= 1, got {}", k));
  if (static_cast<std::size_t>(k) > n) {
    throw ConfigError(fmt::format("cannot form {} clusters from {} points", k, n));
  }
  if (options.restarts < 1) throw ConfigError("k-means needs at least one restart");
  if (k > 1 && count_distinct_rows(points, static_cast<std::size_t>(k)) < static_cast<std::size_t>(k)) {
    throw NumericError(fmt::format("fewer than {} distinct feature rows; clustering is degenerate", k));
  }

  PseudoLabels best;
  best.k = k;
  best.seed = seed;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < options.restarts; ++r) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    Run run = lloyd(points, k, rng, options);
    if (run.inertia < best.inertia) {
      best.assignments = std::move(run.assignments);
      best.inertia = run.inertia;
      best.inertia_trace = std::move(run.trace);
    }
  }
  return best;
}

RowMatrix clustering_features(const Graph& g) {
  const auto& x = g.features();
  RowMatrix h = x;
  for (const auto& e : g.edges()) {
    h.row(e.u) += x.row(e.v);
    h.row(e.v) += x.row(e.u);
  }
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    const double norm = h.row(i).norm();
    if (!(norm >= kDegenerateRowNorm)) {
      throw NumericError(fmt::format("aggregated clustering feature of node {} vanishes", i));
    }
    h.row(i) /= norm;
  }
  return h;
}

PseudoLabels kmeans_pseudo_labels(const Graph& g, int k, std::uint64_t seed, int restarts) {
  KMeansOptions options;
  options.restarts = restarts;
  return kmeans(clustering_features(g), k, seed, options);
}

std::string_view to_string(LabelEncoding encoding) {
  switch (encoding) {
    case LabelEncoding::one_hot: return "one-hot";
    case LabelEncoding::signed_binary: return "signed-binary";
    case LabelEncoding::scalar_truth: return "scalar-truth";
  }
  return "unknown";
}

LabelEncoding parse_label_encoding(std::string_view text) {
  if (text == "one-hot") return LabelEncoding::one_hot;
  if (text == "signed-binary") return LabelEncoding::signed_binary;
  if (text == "scalar-truth") return LabelEncoding::scalar_truth;
  throw ConfigError(fmt::format("unknown label encoding '{}'", text));
}

LabelMatrix encode_labels(std::span<const int> assignments, int k, LabelEncoding encoding) {
  const auto n = static_cast<Eigen::Index>(assignments.size());
  int max_id = -1;
  for (int a : assignments) {
    if (a < 0) throw InputError(fmt::format("class id {} is negative", a));
    max_id = std::max(max_id, a);
  }
  if (k <= 0) k = max_id + 1;
  if (max_id >= k) throw InputError(fmt::format("class id {} exceeds class count {}", max_id, k));

  LabelMatrix out;
  out.encoding = encoding;
  switch (encoding) {
    case LabelEncoding::one_hot:
      out.columns = Eigen::MatrixXd::Zero(n, k);
      for (Eigen::Index i = 0; i < n; ++i) out.columns(i, assignments[static_cast<std::size_t>(i)]) = 1.0;
      break;
    case LabelEncoding::signed_binary:
      if (k != 2) throw ConfigError(fmt::format("signed-binary encoding needs exactly 2 classes, got {}", k));
      out.columns.resize(n, 1);
      for (Eigen::Index i = 0; i < n; ++i) out.columns(i, 0) = assignments[static_cast<std::size_t>(i)] == 0 ? 1.0 : -1.0;
      break;
    case LabelEncoding::scalar_truth: {
      std::vector<double> values(assignments.begin(), assignments.end());
      return encode_scalar_labels(values);
    }
  }
  return out;
}

LabelMatrix encode_labels(const PseudoLabels& labels, LabelEncoding encoding) {
  return encode_labels(labels.assignments, labels.k, encoding);
}

LabelMatrix encode_scalar_labels(std::span<const double> values) {
  LabelMatrix out;
  out.encoding = LabelEncoding::scalar_truth;
  out.columns.resize(static_cast<Eigen::Index>(values.size()), 1);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(std::abs(values[i]) <= 1.0)) {
      throw ConfigError(fmt::format("label {} of node {} violates |y| <= 1", values[i], i));
    }
    out.columns(static_cast<Eigen::Index>(i), 0) = values[i];
  }
  return out;
}

std::string label_digest(const LabelMatrix& labels) {
  std::string bytes(to_string(labels.encoding));
  bytes += fmt::format(":{}x{}:", labels.columns.rows(), labels.columns.cols());
  for (Eigen::Index c = 0; c < labels.columns.cols(); ++c) {
    for (Eigen::Index i = 0; i < labels.columns.rows(); ++i) {
      const auto bits = std::bit_cast<std::uint64_t>(labels.columns(i, c));
      for (int b = 0; b < 8; ++b) bytes.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
    }
  }
  return sha256_hex(bytes);
}

}  // namespace kces
