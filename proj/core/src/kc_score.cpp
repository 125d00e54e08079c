#include "kces/kc_score.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <fmt/format.h>
#include <fmt/os.h>

#include "kces/error.hpp"
#include "kces/parallel.hpp"

namespace kces {
namespace {

[[noreturn]] void rethrow_for_edge(const Error& e, NodeId u, NodeId v) {
  const auto what = fmt::format("edge ({}, {}): {}", u, v, e.what());
  switch (e.category()) {
    case ErrorCategory::input: throw InputError(what);
    case ErrorCategory::numeric: throw NumericError(what);
    case ErrorCategory::config: throw ConfigError(what);
  }
  throw;
}

}  // namespace

std::string_view to_string(ScoreMethod method) {
  return method == ScoreMethod::naive ? "naive" : "fast";
}

ScoreMethod parse_score_method(std::string_view text) {
  if (text == "naive") return ScoreMethod::naive;
  if (text == "fast") return ScoreMethod::fast;
  throw ConfigError(fmt::format("unknown scoring method '{}'", text));
}

std::vector<std::pair<Edge, KcEntry>> KcScoreTable::ranked() const {
  std::vector<std::pair<Edge, KcEntry>> out(entries.begin(), entries.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.second.score > b.second.score; });
  return out;
}

std::size_t KcScoreTable::ridged_edges() const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [](const auto& item) { return item.second.ridge_used; }));
}

GkcValue gkc_without_edge(const Graph& g, const LabelMatrix& labels, NodeId u, NodeId v) {
  try {
    const Graph reduced = remove_edge(g, u, v);
    const auto gm = gram_matrix(aggregate_features(reduced), {.audit_spectrum = false});
    return gkc(gm, labels);
  } catch (const Error& e) {
    rethrow_for_edge(e, u, v);
  }
}

double kc_score_naive(const Graph& g, const LabelMatrix& labels, NodeId u, NodeId v) {
  const auto base = gkc(gram_matrix(aggregate_features(g), {.audit_spectrum = false}), labels);
  return std::abs(base.value - gkc_without_edge(g, labels, u, v).value);
}

FastScoringCache::FastScoringCache(const Graph& g, const LabelMatrix& labels)
    : graph_(g),
      labels_(labels),
      xt_(aggregate_features(g)),
      gram_(gram_matrix(xt_, {.audit_spectrum = false})) {
  base_ = gkc(gram_, labels_, solves_);
  if (!gram_.ridge_used()) {
    inverse_ = gram_.llt().solve(Eigen::MatrixXd::Identity(gram_.h().rows(), gram_.h().cols()));
    inverse_ = 0.5 * (inverse_ + inverse_.transpose());
  }
}

KcEntry FastScoringCache::score(NodeId u, NodeId v) const {
  auto naive = [&] {
    ++fallbacks_;
    const auto removed = gkc_without_edge(graph_, labels_, u, v);
    return KcEntry{std::abs(base_.value - removed.value), removed.value, ScoreMethod::naive, removed.ridge_used};
  };
  if (gram_.ridge_used()) return naive();

  const auto nodes = affected_nodes(graph_, u, v);
  const auto s = static_cast<Eigen::Index>(nodes.size());
  const auto n = gram_.h().rows();

  RowMatrix changed;
  try {
    changed = aggregate_rows(remove_edge(graph_, u, v), nodes);
  } catch (const Error& e) {
    rethrow_for_edge(e, u, v);
  }

  // Columns S of the reduced Gram matrix, then their difference R to the base.
  RowMatrix rows = xt_.matrix;
  for (Eigen::Index k = 0; k < s; ++k) rows.row(nodes[static_cast<std::size_t>(k)]) = changed.row(k);
  Eigen::MatrixXd r = kernel_matrix(rows, changed);
  for (Eigen::Index k = 0; k < s; ++k) {
    const auto node = static_cast<Eigen::Index>(nodes[static_cast<std::size_t>(k)]);
    r(node, k) = 0.5;
    r.col(k) -= gram_.h().col(node);
  }

  Eigen::MatrixXd r_ss(s, s);
  Eigen::MatrixXd g_ss(s, s);
  Eigen::MatrixXd w(2 * s, solves_.cols());
  for (Eigen::Index a = 0; a < s; ++a) {
    const auto na = static_cast<Eigen::Index>(nodes[static_cast<std::size_t>(a)]);
    r_ss.row(a) = r.row(na);
    for (Eigen::Index b = 0; b < s; ++b) {
      g_ss(a, b) = inverse_(na, static_cast<Eigen::Index>(nodes[static_cast<std::size_t>(b)]));
    }
    w.row(a) = solves_.row(na);
  }
  w.bottomRows(s) = r.transpose() * solves_;

  const Eigen::MatrixXd gr = inverse_ * r;
  Eigen::MatrixXd gr_s(s, s);
  for (Eigen::Index a = 0; a < s; ++a) gr_s.row(a) = gr.row(nodes[static_cast<std::size_t>(a)]);

  // Capacitance C^-1 + U^T H^-1 U with C^-1 = [[0, I], [I, R_SS]].
  Eigen::MatrixXd cap(2 * s, 2 * s);
  cap.topLeftCorner(s, s) = g_ss;
  cap.topRightCorner(s, s) = gr_s + Eigen::MatrixXd::Identity(s, s);
  cap.bottomLeftCorner(s, s) = cap.topRightCorner(s, s).transpose();
  cap.bottomRightCorner(s, s) = r.transpose() * gr + r_ss;
  cap = 0.5 * (cap + cap.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cap);
  if (eig.info() != Eigen::Success) return naive();
  const Eigen::VectorXd magnitudes = eig.eigenvalues().cwiseAbs();
  const double smallest = magnitudes.minCoeff();
  if (!(smallest > 0.0) || !(magnitudes.maxCoeff() / smallest <= kMaxCapacitanceCondition)) {
    return naive();
  }

  // y^T H'^-1 y = y^T z - w^T cap^-1 w for each label channel.
  const Eigen::MatrixXd projected = eig.eigenvectors().transpose() * w;
  double drop = 0.0;
  for (Eigen::Index c = 0; c < projected.cols(); ++c) {
    drop += (projected.col(c).array().square() / eig.eigenvalues().array()).sum();
  }
  const double delta = 2.0 * drop / static_cast<double>(n);
  if (!std::isfinite(delta)) return naive();
  return KcEntry{std::abs(delta), base_.value - delta, ScoreMethod::fast, false};
}

double kc_score_fast(const FastScoringCache& cache, NodeId u, NodeId v) {
  return cache.score(u, v).score;
}

KcScoreTable kc_scores_all(const Graph& g, const LabelMatrix& labels, ScoreMethod method, unsigned threads) {
  if (g.num_edges() == 0) throw ConfigError("cannot score a graph without edges");

  const auto& edges = g.edges();
  std::vector<KcEntry> results(edges.size());
  KcScoreTable table;
  table.label_digest = label_digest(labels);

  if (method == ScoreMethod::fast) {
    const FastScoringCache cache(g, labels);
    parallel_for(edges.size(), threads, [&](std::size_t i) { results[i] = cache.score(edges[i].u, edges[i].v); });
    table.base_gkc = cache.base().value;
    table.ridge_used = cache.base().ridge_used;
    table.fallback_count = cache.fallback_count();
  } else {
    const auto base = gkc(gram_matrix(aggregate_features(g), {.audit_spectrum = false}), labels);
    parallel_for(edges.size(), threads, [&](std::size_t i) {
      const auto removed = gkc_without_edge(g, labels, edges[i].u, edges[i].v);
      results[i] = KcEntry{std::abs(base.value - removed.value), removed.value, ScoreMethod::naive, removed.ridge_used};
    });
    table.base_gkc = base.value;
    table.ridge_used = base.ridge_used;
  }

  for (std::size_t i = 0; i < edges.size(); ++i) table.entries.emplace(edges[i], results[i]);
  return table;
}

void write_scores(const std::filesystem::path& path, const KcScoreTable& table) {
  auto out = fmt::output_file(path.string());
  out.print("# base_gkc\t{}\n", table.base_gkc);
  out.print("# label_digest\t{}\n", table.label_digest);
  out.print("# ridge_used\t{}\n", table.ridge_used ? 1 : 0);
  out.print("# ridged_edges\t{}\n", table.ridged_edges());
  for (const auto& [e, entry] : table.ranked()) {
    out.print("{}\t{}\t{}\t{}\n", e.u, e.v, entry.score, to_string(entry.method));
  }
}

KcScoreTable read_scores(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open '{}'", path.string()));
  KcScoreTable table;
  table.base_gkc = std::numeric_limits<double>::quiet_NaN();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      cells.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    try {
      if (line.front() == '#') {
        if (cells.size() == 2 && cells[0] == "# base_gkc") table.base_gkc = std::stod(cells[1]);
        if (cells.size() == 2 && cells[0] == "# label_digest") table.label_digest = cells[1];
        if (cells.size() == 2 && cells[0] == "# ridge_used") table.ridge_used = cells[1] == "1";
        continue;
      }
      if (cells.size() != 4) throw std::invalid_argument("expected 4 columns");
      const auto u = static_cast<NodeId>(std::stoul(cells[0]));
      const auto v = static_cast<NodeId>(std::stoul(cells[1]));
      KcEntry entry;
      entry.score = std::stod(cells[2]);
      entry.method = parse_score_method(cells[3]);
      entry.gkc_removed = std::numeric_limits<double>::quiet_NaN();
      if (u >= v) throw std::invalid_argument("edge not in canonical u < v order");
      table.entries.emplace(Edge{u, v}, entry);
    } catch (const std::exception& e) {
      throw InputError(fmt::format("{}:{}: malformed score line ({})", path.string(), line_no, e.what()));
    }
  }
  return table;
}

}  // namespace kces
