#include "kces/kernel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>

#include <fmt/format.h>

#include "kces/error.hpp"

namespace kces {
namespace {

// Beyond this |d| the arccos is evaluated from the row geometry instead.
constexpr double kNearParallel = 1.0 - 1e-6;

double kernel_from_angle(double d, double theta) {
  return d * (std::numbers::pi - theta) / (2.0 * std::numbers::pi);
}

template <typename RowA, typename RowB>
double kernel_entry(const RowA& a, const RowB& b, double d) {
  if (std::abs(d) < kNearParallel) return relu_kernel(d);
  // theta = 2 atan2(|a - b|, |a + b|) keeps full precision near 0 and pi.
  const double theta = 2.0 * std::atan2((a - b).norm(), (a + b).norm());
  return kernel_from_angle(std::clamp(d, -1.0, 1.0), theta);
}

template <typename T>
void put_le(std::ofstream& out, T value) {
  auto bits = std::bit_cast<std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) out.put(static_cast<char>((bits >> (8 * i)) & 0xff));
}

template <typename U>
U get_le(std::ifstream& in) {
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    const int c = in.get();
    if (c == EOF) throw InputError("truncated Gram matrix file");
    bits |= static_cast<U>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return bits;
}

}  // namespace

double relu_kernel(double d) {
  d = std::clamp(d, -1.0, 1.0);
  return kernel_from_angle(d, std::acos(d));
}

Eigen::MatrixXd kernel_matrix(const RowMatrix& unit_rows) {
  const auto n = unit_rows.rows();
  const Eigen::MatrixXd dots = unit_rows * unit_rows.transpose();
  Eigen::MatrixXd h(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    h(j, j) = 0.5;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double value = kernel_entry(unit_rows.row(i), unit_rows.row(j), dots(i, j));
      h(i, j) = value;
      h(j, i) = value;
    }
  }
  return h;
}

Eigen::MatrixXd kernel_matrix(const RowMatrix& left, const RowMatrix& right) {
  const Eigen::MatrixXd dots = left * right.transpose();
  Eigen::MatrixXd h(dots.rows(), dots.cols());
  for (Eigen::Index j = 0; j < dots.cols(); ++j) {
    for (Eigen::Index i = 0; i < dots.rows(); ++i) {
      h(i, j) = kernel_entry(left.row(i), right.row(j), dots(i, j));
    }
  }
  return h;
}

GramMatrix make_gram(Eigen::MatrixXd h, const GramOptions& options) {
  GramMatrix gm;
  const auto n = h.rows();
  gm.h_ = std::move(h);
  if (options.audit_spectrum && n > 0) gm.lambda_min_ = min_eigenvalue(gm.h_);

  const double scale = n > 0 ? gm.h_.trace() / static_cast<double>(n) : 1.0;
  auto factorises = [&](const Eigen::LLT<Eigen::MatrixXd>& llt) {
    if (llt.info() != Eigen::Success) return false;
    // Pivots this small mean the matrix is singular to working precision.
    const double min_pivot = llt.matrixLLT().diagonal().minCoeff();
    return n == 0 || min_pivot * min_pivot > 1e-12 * scale;
  };

  gm.llt_.compute(gm.h_);
  if (!factorises(gm.llt_)) {
    gm.ridge_ = 1e-8 * scale;
    Eigen::MatrixXd shifted = gm.h_;
    shifted.diagonal().array() += gm.ridge_;
    gm.llt_.compute(shifted);
    gm.warnings_.push_back(fmt::format(
        "Gram matrix is numerically semidefinite; added ridge {:.3e} before factorisation", gm.ridge_));
    if (gm.llt_.info() != Eigen::Success) {
      throw NumericError("Cholesky factorisation failed even after ridge regularisation");
    }
  }
  return gm;
}

GramMatrix gram_matrix(const AggregatedFeatures& xt, const GramOptions& options) {
  return make_gram(kernel_matrix(xt.matrix), options);
}

double min_eigenvalue(const Eigen::MatrixXd& symmetric) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericError("symmetric eigensolver did not converge");
  return solver.eigenvalues()[0];
}

double min_eigenvalue(const GramMatrix& gm) {
  if (gm.lambda_min()) return *gm.lambda_min();
  return min_eigenvalue(gm.h());
}

Eigen::VectorXd solve_spd(const GramMatrix& gm, const Eigen::VectorXd& rhs) {
  if (static_cast<std::size_t>(rhs.size()) != gm.size()) {
    throw InputError(fmt::format("right-hand side has length {}, expected {}", rhs.size(), gm.size()));
  }
  Eigen::VectorXd z = gm.llt().solve(rhs);
  const double rhs_norm = rhs.norm();
  const double residual = (gm.h() * z + gm.ridge() * z - rhs).norm();
  if (!(residual <= 1e-8 * rhs_norm) && !(rhs_norm == 0.0 && residual == 0.0)) {
    throw NumericError(fmt::format("ill-conditioned Gram solve: residual {:.3e} for |rhs| {:.3e}", residual, rhs_norm));
  }
  return z;
}

GkcValue gkc(const GramMatrix& gm, const LabelMatrix& labels, Eigen::MatrixXd& solves) {
  if (labels.rows() != gm.size()) {
    throw InputError(fmt::format("label matrix has {} rows, Gram matrix has {}", labels.rows(), gm.size()));
  }
  const double n = static_cast<double>(gm.size());
  GkcValue out;
  out.ridge_used = gm.ridge_used();
  solves.resize(labels.columns.rows(), labels.columns.cols());
  for (Eigen::Index c = 0; c < labels.columns.cols(); ++c) {
    const Eigen::VectorXd y = labels.columns.col(c);
    solves.col(c) = solve_spd(gm, y);
    const double contribution = 2.0 * y.dot(solves.col(c)) / n;
    out.per_column.push_back(contribution);
    out.value += contribution;
  }
  return out;
}

GkcValue gkc(const GramMatrix& gm, const LabelMatrix& labels) {
  Eigen::MatrixXd solves;
  return gkc(gm, labels, solves);
}

void write_gram_binary(const std::filesystem::path& path, const Eigen::MatrixXd& h) {
  if (h.rows() != h.cols() || h.rows() > static_cast<Eigen::Index>(UINT32_MAX)) {
    throw InputError("Gram matrix must be square and fit a 32-bit size");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(fmt::format("cannot write '{}'", path.string()));
  out.write("GKGM", 4);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(h.rows()));
  put_le<std::uint32_t>(out, 0);
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    for (Eigen::Index j = 0; j < h.cols(); ++j) put_le<double>(out, h(i, j));
  }
}

Eigen::MatrixXd read_gram_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot open '{}'", path.string()));
  char magic[4] = {};
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "GKGM", 4) != 0) throw InputError("not a Gram matrix file (bad magic)");
  const auto n = get_le<std::uint32_t>(in);
  (void)get_le<std::uint32_t>(in);
  Eigen::MatrixXd h(n, n);
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    for (Eigen::Index j = 0; j < h.cols(); ++j) h(i, j) = std::bit_cast<double>(get_le<std::uint64_t>(in));
  }
  return h;
}

}  // namespace kces
