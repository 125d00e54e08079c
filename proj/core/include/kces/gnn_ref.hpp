#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kces/graph.hpp"
#include "kces/kernel.hpp"

namespace kces {

struct TrainConfig {
  int m = 512;         // hidden width
  double eta = 0.0;    // step size; 0 selects 1 / lambda_max of the training Gram matrix
  double kappa = 0.1;  // initial weight scale
  int steps = 500;
  std::uint64_t seed = 0;
};

/// Throws ConfigError unless m >= 1, eta >= 0, kappa in (0, 1], steps >= 0.
void validate(const TrainConfig& cfg);

/// f(x) = m^-1/2 sum_r a_r relu(w_r . x) with fixed output signs a.
struct ModelState {
  Eigen::MatrixXd w;  // F x m, column r is w_r
  Eigen::VectorXd a;  // +-1
  TrainConfig config;
};

/// w_r ~ N(0, kappa^2 I), a_r uniform on {-1, +1}.
ModelState init_model(const TrainConfig& cfg, std::size_t num_features);

Eigen::VectorXd forward(const ModelState& state, const RowMatrix& x);
Eigen::VectorXd forward(const ModelState& state, const AggregatedFeatures& xt);

/// 0.5 * |f - y|^2.
double loss(const ModelState& state, const RowMatrix& x, const Eigen::VectorXd& y);

/// d loss / d W. The ReLU derivative at exactly 0 is taken as 0.
Eigen::MatrixXd gradient(const ModelState& state, const RowMatrix& x, const Eigen::VectorXd& y);

/// 1 / lambda_max of the kernel matrix of the unit rows of x.
double auto_step_size(const RowMatrix& x);

struct TrainTrace {
  std::vector<double> residual_norms;  // |y - f_t|, t = 0..steps
  std::vector<double> losses;          // residual_norms^2 / 2
  std::vector<double> predicted_norms; // optional, filled by callers
  double eta = 0.0;
  ModelState final_state;
};

/// Full-batch gradient descent on the squared loss, W only. Throws
/// NumericError with the step index when the loss stops being finite.
TrainTrace train_gd(ModelState state, const RowMatrix& x, const Eigen::VectorXd& y, const TrainConfig& cfg);

/// CSV "step,residual_norm,loss,predicted_norm"; the last column is empty when
/// no prediction was attached.
void write_trace(const std::filesystem::path& path, const TrainTrace& trace);

/// Residual norm predicted from the spectrum: sqrt(sum (1 - eta l_i)^(2t) (v_i . y)^2).
struct SpectralPrediction {
  std::vector<double> eigenvalues;  // ascending
  std::vector<double> projections;  // (v_i . y)^2
  double eta = 0.0;
  std::vector<std::string> warnings;

  double predicted_norm(int t) const;
};

SpectralPrediction spectral_predictor(const Eigen::MatrixXd& h, const Eigen::VectorXd& y, double eta);
SpectralPrediction spectral_predictor(const GramMatrix& gm, const Eigen::VectorXd& y, double eta);

struct Split {
  std::vector<NodeId> train;
  std::vector<NodeId> val;
  std::vector<NodeId> test;
};

/// Random train/val/test partition with floor(n * train_fraction) and
/// floor(n * val_fraction) nodes in the first two parts.
Split make_split(std::size_t n, std::uint64_t seed, double train_fraction = 0.1, double val_fraction = 0.1);

struct AccuracyReport {
  double train = 0.0;
  double val = 0.0;
  double test = 0.0;
  int classes = 0;
  double eta = 0.0;
  std::vector<int> predictions;
  /// Training trace of each one-vs-rest model, with the spectral prediction attached.
  std::vector<TrainTrace> traces;
};

/// One-vs-rest classifiers (one scalar network per class, +-1 targets on the
/// training nodes) over the aggregated features of g; prediction is the
/// argmax of the class outputs, ties to the lowest class.
AccuracyReport evaluate_classifier(const Graph& g, std::span<const int> labels, const Split& split,
                                   const TrainConfig& cfg, unsigned threads = 1);

/// sqrt(gkc) + c * sqrt(log(n / (lambda0 delta)) / n).
double test_bound(double gkc, std::size_t n, double lambda0, double delta, double c = 1.0);

/// sqrt(base_gkc) + sqrt(kc) + c * sqrt(log(n / (lambda0 delta)) / n).
double edge_bound(double base_gkc, double kc, std::size_t n, double lambda0, double delta, double c = 1.0);

}  // namespace kces
