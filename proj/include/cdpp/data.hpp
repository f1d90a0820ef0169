#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "cdpp/error.hpp"

namespace cdpp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// The dataset: n observations (rows) by p features (columns).
class DataMatrix {
 public:
  DataMatrix() = default;

  explicit DataMatrix(RowMatrix values) : values_(std::move(values)) {
    if (values_.rows() < 2) detail::fail(ErrorKind::DegenerateData, "need at least two observations");
    if (values_.cols() < 1) detail::fail(ErrorKind::DegenerateData, "need at least one feature");
    for (Eigen::Index i = 0; i < values_.rows(); ++i) {
      for (Eigen::Index j = 0; j < values_.cols(); ++j) {
        if (!std::isfinite(values_(i, j))) {
          detail::fail(ErrorKind::DegenerateData, "non-finite value at row " + std::to_string(i) +
                                                      ", column " + std::to_string(j));
        }
      }
    }
  }

  std::size_t n() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  std::size_t p() const noexcept { return static_cast<std::size_t>(values_.cols()); }

  const RowMatrix& values() const noexcept { return values_; }
  auto row(std::size_t i) const { return values_.row(static_cast<Eigen::Index>(i)); }

 private:
  RowMatrix values_;
};

// Dense n x n matrix of squared Euclidean distances, computed once and shared
// by bandwidth estimation, kernel construction and Voronoi assignment.
class SquaredDistances {
 public:
  explicit SquaredDistances(const DataMatrix& data) : d2_(data.n(), data.n()) {
    const auto& x = data.values();
    const Eigen::Index n = x.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
      d2_(i, i) = 0.0;
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double d = (x.row(i) - x.row(j)).squaredNorm();
        d2_(i, j) = d;
        d2_(j, i) = d;
      }
    }
  }

  std::size_t n() const noexcept { return static_cast<std::size_t>(d2_.rows()); }
  double operator()(std::size_t i, std::size_t j) const {
    return d2_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  const Matrix& matrix() const noexcept { return d2_; }

 private:
  Matrix d2_;
};

}  // namespace cdpp
