#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "cdpp/data.hpp"
#include "cdpp/error.hpp"

namespace cdpp {

struct BandwidthConfig {
  double sigma2_hat = 0.0;  // squared-distance units
  double s = 1.0;           // multiplicative tuning factor
};

/// Mean of all pairwise squared Euclidean distances, 2 * sum_{i<j} |x_i - x_j|^2 / (n (n - 1)).
/// Throws DegenerateData when every observation is identical.
inline double estimate_bandwidth(const SquaredDistances& d2) {
  const std::size_t n = d2.n();
  if (n < 2) detail::fail(ErrorKind::DegenerateData, "bandwidth needs at least two observations");
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) sum += d2(i, j);
  }
  const double sigma2 = 2.0 * sum / (static_cast<double>(n) * static_cast<double>(n - 1));
  if (!(sigma2 > 0.0)) detail::fail(ErrorKind::DegenerateData, "all observations are identical");
  return sigma2;
}

inline double estimate_bandwidth(const DataMatrix& data) { return estimate_bandwidth(SquaredDistances(data)); }

// Symmetric similarity matrix L. RBF kernels produce entries in (0, 1] with a
// unit diagonal; from_dense() admits any symmetric matrix (identity, linear
// Gram matrices) for diagnostics and tests.
class KernelMatrix {
 public:
  KernelMatrix() = default;

  static KernelMatrix from_dense(Matrix entries) {
    if (entries.rows() != entries.cols()) detail::fail(ErrorKind::ShapeMismatch, "kernel matrix must be square");
    for (Eigen::Index i = 0; i < entries.rows(); ++i) {
      for (Eigen::Index j = i + 1; j < entries.cols(); ++j) {
        if (entries(i, j) != entries(j, i)) detail::fail(ErrorKind::ShapeMismatch, "kernel matrix must be symmetric");
      }
    }
    KernelMatrix k;
    k.entries_ = std::move(entries);
    return k;
  }

  std::size_t n() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
  const Matrix& entries() const noexcept { return entries_; }
  double operator()(std::size_t i, std::size_t j) const {
    return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

 private:
  Matrix entries_;
};

/// Gaussian kernel exp(-|x_i - x_j|^2 / (2 s sigma2_hat)).
inline KernelMatrix build_rbf_kernel(const SquaredDistances& d2, const BandwidthConfig& cfg) {
  if (!(cfg.sigma2_hat > 0.0) || !std::isfinite(cfg.sigma2_hat))
    detail::fail(ErrorKind::Config, "bandwidth sigma2_hat must be positive");
  if (!(cfg.s > 0.0) || !std::isfinite(cfg.s)) detail::fail(ErrorKind::Config, "bandwidth factor s must be positive");
  const auto n = static_cast<Eigen::Index>(d2.n());
  const double scale = 1.0 / (2.0 * cfg.s * cfg.sigma2_hat);
  Matrix l(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    l(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = std::exp(-d2.matrix()(i, j) * scale);
      l(i, j) = v;
      l(j, i) = v;
    }
  }
  return KernelMatrix::from_dense(std::move(l));
}

inline KernelMatrix build_rbf_kernel(const DataMatrix& data, const BandwidthConfig& cfg) {
  return build_rbf_kernel(SquaredDistances(data), cfg);
}

// Orthonormal eigensystem of L: eigenvalues descending, eigenvectors stored as
// the columns of `eigenvectors` in matching order.
struct SpectralDecomposition {
  Vector eigenvalues;
  Matrix eigenvectors;

  std::size_t n() const noexcept { return static_cast<std::size_t>(eigenvalues.size()); }

  // log det(L + I) = sum_i log(lambda_i + 1).
  double log_det_l_plus_i() const {
    double s = 0.0;
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) s += std::log1p(eigenvalues(i));
    return s;
  }

  // Expected cardinality of a DPP draw, sum_i lambda_i / (lambda_i + 1).
  double expected_dpp_size() const {
    double s = 0.0;
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) s += eigenvalues(i) / (eigenvalues(i) + 1.0);
    return s;
  }
};

inline double psd_tolerance(std::size_t n) { return 1e-8 * static_cast<double>(n); }

/// Symmetric eigendecomposition. Eigenvalues in [-1e-8 n, 0) are clamped to
/// zero; anything more negative means L is not PSD and raises NumericalFailure.
inline SpectralDecomposition eigendecompose(const KernelMatrix& l) {
  const std::size_t n = l.n();
  if (n == 0) detail::fail(ErrorKind::ShapeMismatch, "empty kernel matrix");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(l.entries(), Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) detail::fail(ErrorKind::NumericalFailure, "symmetric eigensolver did not converge");

  const Vector& ascending = solver.eigenvalues();
  const double tol = psd_tolerance(n);
  if (ascending(0) < -tol) {
    detail::fail(ErrorKind::NumericalFailure,
                 "kernel matrix is not positive semidefinite (min eigenvalue " + std::to_string(ascending(0)) + ")");
  }

  SpectralDecomposition out;
  const auto m = static_cast<Eigen::Index>(n);
  out.eigenvalues.resize(m);
  out.eigenvectors.resize(m, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const Eigen::Index src = m - 1 - k;
    out.eigenvalues(k) = std::max(0.0, ascending(src));
    out.eigenvectors.col(k) = solver.eigenvectors().col(src);
  }
  return out;
}

}  // namespace cdpp
