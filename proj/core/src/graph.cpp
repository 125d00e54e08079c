#include "kces/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string_view>

#include <fmt/format.h>
#include <fmt/os.h>

#include "kces/error.hpp"

namespace kces {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open '{}'", path.string()));
  return in;
}

template <typename T>
T parse_number(std::string_view token, const std::filesystem::path& path, std::size_t line_no) {
  token = trim(token);
  T value{};
  const auto* begin = token.data();
  const auto* end = token.data() + token.size();
  if (!token.empty() && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (token.empty() || ec != std::errc() || ptr != end) {
    throw InputError(fmt::format("{}:{}: cannot parse '{}' as a number", path.string(), line_no, token));
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) {
      throw InputError(fmt::format("{}:{}: non-finite value '{}'", path.string(), line_no, token));
    }
  }
  return value;
}

std::vector<std::vector<NodeId>> build_adjacency(std::size_t n, const std::vector<Edge>& edges) {
  std::vector<std::vector<NodeId>> adj(n);
  for (const auto& e : edges) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  for (auto& list : adj) std::sort(list.begin(), list.end());
  return adj;
}

}  // namespace

Graph Graph::from_pairs(RowMatrix features, std::span<const Edge> pairs,
                        std::optional<std::vector<int>> labels, IngestReport* report) {
  const auto n = static_cast<std::size_t>(features.rows());
  if (labels && labels->size() != n) {
    throw InputError(fmt::format("label count {} does not match node count {}", labels->size(), n));
  }

  IngestReport local;
  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (const auto& p : pairs) {
    if (p.u >= n || p.v >= n) {
      throw InputError(fmt::format("edge ({}, {}) references a node >= {}", p.u, p.v, n));
    }
    if (p.u == p.v) {
      ++local.self_loops_dropped;
      continue;
    }
    edges.push_back(Edge::canonical(p.u, p.v));
  }
  std::sort(edges.begin(), edges.end());
  const auto unique_end = std::unique(edges.begin(), edges.end());
  local.duplicate_edges = static_cast<std::size_t>(edges.end() - unique_end);
  edges.erase(unique_end, edges.end());

  if (report) *report = local;

  Graph g;
  g.features_ = std::move(features);
  g.adjacency_ = build_adjacency(n, edges);
  g.edges_ = std::move(edges);
  g.labels_ = std::move(labels);
  return g;
}

std::vector<std::size_t> Graph::degrees() const {
  std::vector<std::size_t> out(num_nodes());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = adjacency_[i].size() + 1;
  return out;
}

bool Graph::has_edge(NodeId a, NodeId b) const {
  if (a == b || a >= num_nodes() || b >= num_nodes()) return false;
  const auto& list = adjacency_[a];
  return std::binary_search(list.begin(), list.end(), b);
}

Graph Graph::with_labels(std::optional<std::vector<int>> labels) const {
  if (labels && labels->size() != num_nodes()) {
    throw InputError(fmt::format("label count {} does not match node count {}", labels->size(), num_nodes()));
  }
  Graph g = *this;
  g.labels_ = std::move(labels);
  return g;
}

Graph Graph::with_edges(std::span<const Edge> pairs) const {
  return from_pairs(features_, pairs, labels_);
}

bool operator==(const Graph& a, const Graph& b) {
  return a.features_.rows() == b.features_.rows() && a.features_.cols() == b.features_.cols() &&
         a.features_ == b.features_ && a.edges_ == b.edges_ && a.labels_ == b.labels_;
}

AggregatedFeatures AggregatedFeatures::select_rows(std::span<const NodeId> rows) const {
  AggregatedFeatures out;
  out.matrix.resize(static_cast<Eigen::Index>(rows.size()), matrix.cols());
  out.pre_norm_row_norms.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out.matrix.row(static_cast<Eigen::Index>(k)) = matrix.row(rows[k]);
    out.pre_norm_row_norms[static_cast<Eigen::Index>(k)] = pre_norm_row_norms[rows[k]];
  }
  return out;
}

RowMatrix aggregate_rows(const Graph& g, std::span<const NodeId> rows, Eigen::VectorXd* pre_norms) {
  const auto& x = g.features();
  RowMatrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  if (pre_norms) pre_norms->resize(static_cast<Eigen::Index>(rows.size()));

  for (std::size_t k = 0; k < rows.size(); ++k) {
    const NodeId i = rows[k];
    const double inv_sqrt_di = 1.0 / std::sqrt(static_cast<double>(g.degree(i)));
    auto row = out.row(static_cast<Eigen::Index>(k));
    row = x.row(i) * inv_sqrt_di;
    for (NodeId j : g.neighbors(i)) {
      row += x.row(j) / std::sqrt(static_cast<double>(g.degree(j)));
    }
    row *= inv_sqrt_di;

    const double norm = row.norm();
    if (!(norm >= kDegenerateRowNorm)) {
      throw NumericError(fmt::format(
          "aggregated feature row of node {} has norm {:.3e}; the node has no kernel direction", i, norm));
    }
    row /= norm;
    if (pre_norms) (*pre_norms)[static_cast<Eigen::Index>(k)] = norm;
  }
  return out;
}

AggregatedFeatures aggregate_features(const Graph& g) {
  std::vector<NodeId> all(g.num_nodes());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<NodeId>(i);
  AggregatedFeatures out;
  out.matrix = aggregate_rows(g, all, &out.pre_norm_row_norms);
  return out;
}

Graph remove_edge(const Graph& g, NodeId u, NodeId v) {
  if (u == v) throw InputError(fmt::format("({}, {}) is a self-loop; self-loops are implicit", u, v));
  if (!g.has_edge(u, v)) throw InputError(fmt::format("edge ({}, {}) is not in the graph", u, v));
  const Edge target = Edge::canonical(u, v);
  std::vector<Edge> kept;
  kept.reserve(g.num_edges() - 1);
  for (const auto& e : g.edges()) {
    if (e != target) kept.push_back(e);
  }
  return g.with_edges(kept);
}

std::vector<NodeId> affected_nodes(const Graph& g, NodeId u, NodeId v) {
  if (u == v || !g.has_edge(u, v)) throw InputError(fmt::format("edge ({}, {}) is not in the graph", u, v));
  std::vector<NodeId> out;
  const auto nu = g.neighbors(u);
  const auto nv = g.neighbors(v);
  out.reserve(nu.size() + nv.size() + 2);
  out.insert(out.end(), nu.begin(), nu.end());
  out.insert(out.end(), nv.begin(), nv.end());
  out.push_back(u);
  out.push_back(v);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

RowMatrix read_features(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty()) continue;
    std::size_t count = 0;
    std::size_t start = 0;
    while (true) {
      const auto comma = body.find(',', start);
      const auto cell = body.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      values.push_back(parse_number<double>(cell, path, line_no));
      ++count;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (rows == 0) {
      cols = count;
    } else if (count != cols) {
      throw InputError(fmt::format("{}:{}: expected {} columns, found {}", path.string(), line_no, cols, count));
    }
    ++rows;
  }
  if (rows == 0) throw InputError(fmt::format("{}: no feature rows", path.string()));
  RowMatrix x(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  std::copy(values.begin(), values.end(), x.data());
  return x;
}

std::vector<Edge> read_edge_pairs(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<Edge> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto split = body.find_first_of(" \t");
    if (split == std::string_view::npos) {
      throw InputError(fmt::format("{}:{}: expected two node ids", path.string(), line_no));
    }
    const auto a = parse_number<std::uint64_t>(body.substr(0, split), path, line_no);
    const auto b = parse_number<std::uint64_t>(trim(body.substr(split)), path, line_no);
    if (a > UINT32_MAX || b > UINT32_MAX) {
      throw InputError(fmt::format("{}:{}: node id out of range", path.string(), line_no));
    }
    pairs.push_back(Edge{static_cast<NodeId>(a), static_cast<NodeId>(b)});
  }
  return pairs;
}

std::vector<int> read_labels(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty()) continue;
    labels.push_back(parse_number<int>(body, path, line_no));
  }
  return labels;
}

Graph load_graph(const std::filesystem::path& edge_path, const std::filesystem::path& feature_path,
                 const std::optional<std::filesystem::path>& label_path, IngestReport* report) {
  auto features = read_features(feature_path);
  const auto pairs = read_edge_pairs(edge_path);
  std::optional<std::vector<int>> labels;
  if (label_path) labels = read_labels(*label_path);
  return Graph::from_pairs(std::move(features), pairs, std::move(labels), report);
}

void write_edges(const std::filesystem::path& path, std::span<const Edge> edges) {
  auto out = fmt::output_file(path.string());
  for (const auto& e : edges) out.print("{}\t{}\n", e.u, e.v);
}

void write_features(const std::filesystem::path& path, const RowMatrix& features) {
  auto out = fmt::output_file(path.string());
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    for (Eigen::Index j = 0; j < features.cols(); ++j) {
      if (j > 0) out.print(",");
      out.print("{}", features(i, j));  // shortest round-trip representation
    }
    out.print("\n");
  }
}

void write_labels(const std::filesystem::path& path, std::span<const int> labels) {
  auto out = fmt::output_file(path.string());
  for (int y : labels) out.print("{}\n", y);
}

void save_graph(const Graph& g, const std::filesystem::path& edge_path,
                const std::filesystem::path& feature_path,
                const std::optional<std::filesystem::path>& label_path) {
  write_edges(edge_path, g.edges());
  write_features(feature_path, g.features());
  if (label_path && g.labels()) write_labels(*label_path, *g.labels());
}

}  // namespace kces
