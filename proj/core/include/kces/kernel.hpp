#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kces/graph.hpp"
#include "kces/pseudolabel.hpp"

namespace kces {

/// ReLU arc-cosine kernel on unit vectors with inner product `d`:
/// d (pi - arccos d) / (2 pi), with d clamped to [-1, 1].
double relu_kernel(double d);

struct GramOptions {
  /// Compute the smallest eigenvalue eagerly. Scoring loops switch this off.
  bool audit_spectrum = true;
};

/// Gram matrix of the two-layer ReLU kernel over aggregated features, with a
/// cached Cholesky factor of h + ridge * I.
class GramMatrix {
 public:
  const Eigen::MatrixXd& h() const noexcept { return h_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(h_.rows()); }

  /// Lower-triangular L with L L^T = h + ridge * I.
  Eigen::MatrixXd factor() const { return llt_.matrixL(); }
  const Eigen::LLT<Eigen::MatrixXd>& llt() const noexcept { return llt_; }

  double ridge() const noexcept { return ridge_; }
  bool ridge_used() const noexcept { return ridge_ > 0.0; }
  const std::optional<double>& lambda_min() const noexcept { return lambda_min_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  friend GramMatrix make_gram(Eigen::MatrixXd h, const GramOptions& options);

 private:
  Eigen::MatrixXd h_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double ridge_ = 0.0;
  std::optional<double> lambda_min_;
  std::vector<std::string> warnings_;
};

/// Factorises an already-assembled kernel matrix. Falls back to a ridge of
/// 1e-8 * trace / N when the plain Cholesky factorisation breaks down.
GramMatrix make_gram(Eigen::MatrixXd h, const GramOptions& options = {});

/// Raw kernel matrix entries for unit rows.
Eigen::MatrixXd kernel_matrix(const RowMatrix& unit_rows);
Eigen::MatrixXd kernel_matrix(const RowMatrix& left, const RowMatrix& right);

GramMatrix gram_matrix(const AggregatedFeatures& xt, const GramOptions& options = {});

/// Smallest eigenvalue of h (before any ridge), from a symmetric eigensolver.
double min_eigenvalue(const GramMatrix& gm);
double min_eigenvalue(const Eigen::MatrixXd& symmetric);

/// Solution of (h + ridge I) z = rhs. Throws NumericError when the relative
/// residual exceeds 1e-8.
Eigen::VectorXd solve_spd(const GramMatrix& gm, const Eigen::VectorXd& rhs);

struct GkcValue {
  double value = 0.0;
  std::vector<double> per_column;
  bool ridge_used = false;
};

/// 2 y^T H^-1 y / N summed over label channels, via the cached factor.
GkcValue gkc(const GramMatrix& gm, const LabelMatrix& labels);

/// Same as `gkc`, also returning the solves z_c = H^-1 y_c column-wise.
GkcValue gkc(const GramMatrix& gm, const LabelMatrix& labels, Eigen::MatrixXd& solves);

// Binary cache: "GKGM", u32 N, u32 reserved (0), then N*N little-endian f64 row-major.
void write_gram_binary(const std::filesystem::path& path, const Eigen::MatrixXd& h);
Eigen::MatrixXd read_gram_binary(const std::filesystem::path& path);

}  // namespace kces
