#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cdpp/data.hpp"
#include "cdpp/error.hpp"

namespace cdpp {

enum class Preprocessing { None, Standardize, BoxCox };

inline const char* to_string(Preprocessing p) noexcept {
  switch (p) {
    case Preprocessing::None: return "none";
    case Preprocessing::Standardize: return "standardize";
    case Preprocessing::BoxCox: return "boxcox";
  }
  return "unknown";
}

inline Preprocessing parse_preprocessing(const std::string& s) {
  if (s == "none") return Preprocessing::None;
  if (s == "standardize") return Preprocessing::Standardize;
  if (s == "boxcox") return Preprocessing::BoxCox;
  detail::fail(ErrorKind::Config, "unknown preprocessing '" + s + "'");
}

/// Zero mean, unit (population) variance per column.
inline DataMatrix standardize(const DataMatrix& data) {
  RowMatrix x = data.values();
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double mean = x.col(c).mean();
    const double sd = std::sqrt((x.col(c).array() - mean).square().mean());
    if (!(sd > 0.0)) detail::fail(ErrorKind::DegenerateData, "column " + std::to_string(c) + " is constant");
    x.col(c) = (x.col(c).array() - mean) / sd;
  }
  return DataMatrix(std::move(x));
}

namespace detail {

inline double boxcox_value(double x, double lambda) {
  return lambda == 0.0 ? std::log(x) : (std::pow(x, lambda) - 1.0) / lambda;
}

}  // namespace detail

/// Profile log-likelihood of a Box-Cox exponent for a strictly positive sample:
/// -n/2 log(var_ML(y)) + (lambda - 1) sum log x.
inline double boxcox_log_likelihood(const Vector& x, double lambda) {
  const auto n = static_cast<double>(x.size());
  Vector y(x.size());
  double log_sum = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    y(i) = detail::boxcox_value(x(i), lambda);
    log_sum += std::log(x(i));
  }
  const double var = (y.array() - y.mean()).square().mean();
  if (!(var > 0.0)) return -std::numeric_limits<double>::infinity();
  return -0.5 * n * std::log(var) + (lambda - 1.0) * log_sum;
}

struct BoxCoxColumn {
  double lambda = 1.0;
  double shift = 0.0;  // added before transforming
};

/// Per-column Box-Cox with lambda picked from {-2, -1.9, ..., 2} by maximum
/// likelihood. Columns with non-positive entries are first shifted so their
/// minimum becomes 1. Constant columns raise DegenerateData.
inline DataMatrix boxcox_transform(const DataMatrix& data, std::vector<BoxCoxColumn>* fitted = nullptr) {
  RowMatrix x = data.values();
  if (fitted) fitted->clear();
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    Vector col = x.col(c);
    const double lo = col.minCoeff();
    if (lo == col.maxCoeff()) detail::fail(ErrorKind::DegenerateData, "column " + std::to_string(c) + " is constant");
    BoxCoxColumn fit;
    if (lo <= 0.0) {
      fit.shift = 1.0 - lo;
      col.array() += fit.shift;
    }
    double best = -std::numeric_limits<double>::infinity();
    for (int step = -20; step <= 20; ++step) {
      const double lambda = step / 10.0;
      const double ll = boxcox_log_likelihood(col, lambda);
      if (ll > best) {
        best = ll;
        fit.lambda = lambda;
      }
    }
    for (Eigen::Index i = 0; i < col.size(); ++i) x(i, c) = detail::boxcox_value(col(i), fit.lambda);
    if (fitted) fitted->push_back(fit);
  }
  return DataMatrix(std::move(x));
}

inline DataMatrix preprocess(const DataMatrix& data, Preprocessing how) {
  switch (how) {
    case Preprocessing::None: return data;
    case Preprocessing::Standardize: return standardize(data);
    case Preprocessing::BoxCox: return boxcox_transform(data);
  }
  return data;
}

}  // namespace cdpp
