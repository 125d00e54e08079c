#include "kces/gnn_ref.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <fmt/os.h>

#include "kces/error.hpp"
#include "kces/parallel.hpp"
#include "kces/random.hpp"

namespace kces {
namespace {

RowMatrix gather_rows(const RowMatrix& x, std::span<const NodeId> rows) {
  RowMatrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(rows[i]);
  return out;
}

double accuracy(std::span<const int> predicted, std::span<const int> labels, std::span<const NodeId> nodes) {
  if (nodes.empty()) return 0.0;
  std::size_t hits = 0;
  for (auto i : nodes) hits += predicted[i] == labels[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(nodes.size());
}

void check_bound_domain(std::size_t n, double lambda0, double delta) {
  if (n == 0) throw ConfigError("bound needs n >= 1");
  if (!(lambda0 > 0.0)) throw ConfigError(fmt::format("lambda0 must be positive, got {}", lambda0));
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError(fmt::format("delta must lie in (0, 1), got {}", delta));
}

double confidence_term(std::size_t n, double lambda0, double delta, double c) {
  const double nd = static_cast<double>(n);
  const double log_term = std::log(nd / (lambda0 * delta));
  if (log_term < 0.0) throw ConfigError("log(n / (lambda0 delta)) is negative");
  return c * std::sqrt(log_term / nd);
}

}  // namespace

void validate(const TrainConfig& cfg) {
  if (cfg.m < 1) throw ConfigError(fmt::format("hidden width must be >= 1, got {}", cfg.m));
  if (!(cfg.eta >= 0.0) || !std::isfinite(cfg.eta)) throw ConfigError(fmt::format("step size must be >= 0, got {}", cfg.eta));
  if (!(cfg.kappa > 0.0 && cfg.kappa <= 1.0)) throw ConfigError(fmt::format("kappa must lie in (0, 1], got {}", cfg.kappa));
  if (cfg.steps < 0) throw ConfigError(fmt::format("steps must be >= 0, got {}", cfg.steps));
}

ModelState init_model(const TrainConfig& cfg, std::size_t num_features) {
  validate(cfg);
  ModelState state;
  state.config = cfg;
  state.w.resize(static_cast<Eigen::Index>(num_features), cfg.m);
  state.a.resize(cfg.m);
  Rng rng(cfg.seed);
  for (Eigen::Index r = 0; r < cfg.m; ++r) {
    for (Eigen::Index f = 0; f < state.w.rows(); ++f) state.w(f, r) = cfg.kappa * standard_normal(rng);
  }
  for (Eigen::Index r = 0; r < cfg.m; ++r) state.a(r) = uniform01(rng) < 0.5 ? 1.0 : -1.0;
  return state;
}

Eigen::VectorXd forward(const ModelState& state, const RowMatrix& x) {
  if (x.cols() != state.w.rows()) {
    throw InputError(fmt::format("model expects {} features, got {}", state.w.rows(), x.cols()));
  }
  const Eigen::MatrixXd z = (x * state.w).cwiseMax(0.0);
  return z * state.a / std::sqrt(static_cast<double>(state.w.cols()));
}

Eigen::VectorXd forward(const ModelState& state, const AggregatedFeatures& xt) { return forward(state, xt.matrix); }

double loss(const ModelState& state, const RowMatrix& x, const Eigen::VectorXd& y) {
  return 0.5 * (forward(state, x) - y).squaredNorm();
}

Eigen::MatrixXd gradient(const ModelState& state, const RowMatrix& x, const Eigen::VectorXd& y) {
  if (y.size() != x.rows()) throw InputError(fmt::format("expected {} targets, got {}", x.rows(), y.size()));
  const Eigen::MatrixXd z = x * state.w;
  const Eigen::VectorXd f = z.cwiseMax(0.0) * state.a / std::sqrt(static_cast<double>(state.w.cols()));
  const Eigen::VectorXd residual = f - y;
  Eigen::MatrixXd weights = (z.array() > 0.0).cast<double>().matrix();
  weights = residual.asDiagonal() * weights * state.a.asDiagonal();
  return x.transpose() * weights / std::sqrt(static_cast<double>(state.w.cols()));
}

double auto_step_size(const RowMatrix& x) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(kernel_matrix(x), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericError("symmetric eigensolver did not converge");
  return 1.0 / solver.eigenvalues().maxCoeff();
}

TrainTrace train_gd(ModelState state, const RowMatrix& x, const Eigen::VectorXd& y, const TrainConfig& cfg) {
  validate(cfg);
  if (y.size() != x.rows()) throw InputError(fmt::format("expected {} targets, got {}", x.rows(), y.size()));
  if (y.size() > 0 && y.cwiseAbs().maxCoeff() > 1.0) throw ConfigError("training targets must satisfy |y| <= 1");

  TrainTrace trace;
  trace.eta = cfg.eta > 0.0 ? cfg.eta : auto_step_size(x);
  auto record = [&](int step) {
    const double norm = (y - forward(state, x)).norm();
    const double value = 0.5 * norm * norm;
    if (!std::isfinite(value)) {
      throw NumericError(fmt::format("training diverged at step {} (eta {:.4g} too large?)", step, trace.eta));
    }
    trace.residual_norms.push_back(norm);
    trace.losses.push_back(value);
  };
  record(0);
  for (int step = 1; step <= cfg.steps; ++step) {
    state.w -= trace.eta * gradient(state, x, y);
    record(step);
  }
  trace.final_state = std::move(state);
  return trace;
}

void write_trace(const std::filesystem::path& path, const TrainTrace& trace) {
  auto out = fmt::output_file(path.string());
  out.print("step,residual_norm,loss,predicted_norm\n");
  for (std::size_t t = 0; t < trace.residual_norms.size(); ++t) {
    if (t < trace.predicted_norms.size()) {
      out.print("{},{},{},{}\n", t, trace.residual_norms[t], trace.losses[t], trace.predicted_norms[t]);
    } else {
      out.print("{},{},{},\n", t, trace.residual_norms[t], trace.losses[t]);
    }
  }
}

double SpectralPrediction::predicted_norm(int t) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    sum += std::pow(1.0 - eta * eigenvalues[i], 2.0 * t) * projections[i];
  }
  return std::sqrt(sum);
}

SpectralPrediction spectral_predictor(const Eigen::MatrixXd& h, const Eigen::VectorXd& y, double eta) {
  if (y.size() != h.rows()) throw InputError(fmt::format("expected {} targets, got {}", h.rows(), y.size()));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
  if (solver.info() != Eigen::Success) throw NumericError("symmetric eigensolver did not converge");
  SpectralPrediction out;
  out.eta = eta;
  const Eigen::VectorXd proj = solver.eigenvectors().transpose() * y;
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    out.eigenvalues.push_back(solver.eigenvalues()(i));
    out.projections.push_back(proj(i) * proj(i));
  }
  if (!out.eigenvalues.empty() && eta * out.eigenvalues.back() >= 2.0) {
    out.warnings.push_back(fmt::format("eta * lambda_max = {:.4g} >= 2; the prediction diverges",
                                       eta * out.eigenvalues.back()));
  }
  return out;
}

SpectralPrediction spectral_predictor(const GramMatrix& gm, const Eigen::VectorXd& y, double eta) {
  return spectral_predictor(gm.h(), y, eta);
}

Split make_split(std::size_t n, std::uint64_t seed, double train_fraction, double val_fraction) {
  if (!(train_fraction > 0.0 && val_fraction >= 0.0 && train_fraction + val_fraction <= 1.0)) {
    throw ConfigError("split fractions must be positive and sum to at most 1");
  }
  std::vector<NodeId> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<NodeId>(i);
  Rng rng(seed);
  shuffle(order, rng);
  const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n)));
  const auto n_val = static_cast<std::size_t>(std::floor(val_fraction * static_cast<double>(n)));
  Split split;
  split.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.val.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                   order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  split.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), order.end());
  for (auto* part : {&split.train, &split.val, &split.test}) std::sort(part->begin(), part->end());
  return split;
}

AccuracyReport evaluate_classifier(const Graph& g, std::span<const int> labels, const Split& split,
                                   const TrainConfig& cfg, unsigned threads) {
  validate(cfg);
  const std::size_t n = g.num_nodes();
  if (labels.size() != n) throw InputError(fmt::format("expected {} labels, got {}", n, labels.size()));
  std::vector<char> seen(n, 0);
  for (const auto* part : {&split.train, &split.val, &split.test}) {
    for (auto i : *part) {
      if (i >= n || seen[i]) throw ConfigError("split masks must be disjoint node subsets");
      seen[i] = 1;
    }
  }
  int classes = 0;
  for (int c : labels) {
    if (c < 0) throw InputError("class ids must be non-negative");
    classes = std::max(classes, c + 1);
  }
  std::vector<int> train_counts(static_cast<std::size_t>(classes), 0);
  for (auto i : split.train) ++train_counts[static_cast<std::size_t>(labels[i])];
  for (int c = 0; c < classes; ++c) {
    if (train_counts[static_cast<std::size_t>(c)] == 0) {
      throw ConfigError(fmt::format("degenerate split: class {} has no training node", c));
    }
  }

  const auto xt = aggregate_features(g);
  const RowMatrix x_train = gather_rows(xt.matrix, split.train);
  TrainConfig run = cfg;
  if (run.eta == 0.0) run.eta = auto_step_size(x_train);

  Eigen::MatrixXd outputs(static_cast<Eigen::Index>(n), classes);
  const Eigen::MatrixXd h_train = kernel_matrix(x_train);
  std::vector<TrainTrace> traces(static_cast<std::size_t>(classes));
  parallel_for(static_cast<std::size_t>(classes), threads, [&](std::size_t c) {
    TrainConfig per_class = run;
    per_class.seed = derive_seed(cfg.seed, c);
    Eigen::VectorXd targets(x_train.rows());
    for (std::size_t i = 0; i < split.train.size(); ++i) {
      targets(static_cast<Eigen::Index>(i)) = labels[split.train[i]] == static_cast<int>(c) ? 1.0 : -1.0;
    }
    auto trace = train_gd(init_model(per_class, g.num_features()), x_train, targets, per_class);
    outputs.col(static_cast<Eigen::Index>(c)) = forward(trace.final_state, xt.matrix);
    const auto prediction = spectral_predictor(h_train, targets, run.eta);
    for (int t = 0; t <= run.steps; ++t) trace.predicted_norms.push_back(prediction.predicted_norm(t));
    traces[c] = std::move(trace);
  });

  AccuracyReport report;
  report.classes = classes;
  report.eta = run.eta;
  report.traces = std::move(traces);
  report.predictions.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < classes; ++c) {
      if (outputs(static_cast<Eigen::Index>(i), c) > outputs(static_cast<Eigen::Index>(i), best)) best = c;
    }
    report.predictions[i] = static_cast<int>(best);
  }
  report.train = accuracy(report.predictions, labels, split.train);
  report.val = accuracy(report.predictions, labels, split.val);
  report.test = accuracy(report.predictions, labels, split.test);
  return report;
}

double test_bound(double gkc, std::size_t n, double lambda0, double delta, double c) {
  check_bound_domain(n, lambda0, delta);
  if (!(gkc >= 0.0)) throw ConfigError(fmt::format("GKC must be non-negative, got {}", gkc));
  return std::sqrt(gkc) + confidence_term(n, lambda0, delta, c);
}

double edge_bound(double base_gkc, double kc, std::size_t n, double lambda0, double delta, double c) {
  check_bound_domain(n, lambda0, delta);
  if (!(base_gkc >= 0.0)) throw ConfigError(fmt::format("GKC must be non-negative, got {}", base_gkc));
  if (!(kc >= 0.0)) throw ConfigError(fmt::format("KC score must be non-negative, got {}", kc));
  return std::sqrt(base_gkc) + std::sqrt(kc) + confidence_term(n, lambda0, delta, c);
}

}  // namespace kces
