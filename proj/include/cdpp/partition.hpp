#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cdpp/data.hpp"
#include "cdpp/error.hpp"
#include "cdpp/sampling.hpp"

namespace cdpp {

// A hard assignment of n observations to K nonempty clusters. Labels are kept
// canonical: cluster ids 0..K-1 in order of first appearance, so two
// partitions describe the same grouping iff their label vectors are equal.
class Partition {
 public:
  Partition() = default;

  template <typename Int>
  static Partition from_labels(std::span<const Int> raw) {
    Partition p;
    p.labels_.resize(raw.size());
    std::unordered_map<Int, int> seen;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      p.labels_[i] = seen.try_emplace(raw[i], static_cast<int>(seen.size())).first->second;
    }
    p.k_ = seen.size();
    return p;
  }

  static Partition from_labels(const std::vector<int>& raw) { return from_labels(std::span<const int>(raw)); }

  std::size_t n() const noexcept { return labels_.size(); }
  std::size_t k() const noexcept { return k_; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  int operator[](std::size_t i) const { return labels_[i]; }

  std::vector<std::size_t> sizes() const {
    std::vector<std::size_t> s(k_, 0);
    for (int l : labels_) ++s[static_cast<std::size_t>(l)];
    return s;
  }

  // Member indices of every cluster, ascending.
  std::vector<std::vector<std::size_t>> members() const {
    std::vector<std::vector<std::size_t>> m(k_);
    for (std::size_t i = 0; i < labels_.size(); ++i) m[static_cast<std::size_t>(labels_[i])].push_back(i);
    return m;
  }

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<int> labels_;
  std::size_t k_ = 0;
};

/// Nearest-generator assignment. Ties go to the generator listed first in
/// gens.indices; cells left empty by ties disappear when labels are compacted.
inline Partition voronoi_assign(const SquaredDistances& d2, const GeneratorSet& gens) {
  const std::size_t n = d2.n();
  if (gens.size() == 0) detail::fail(ErrorKind::Config, "generator set is empty");
  for (std::size_t g : gens.indices) {
    if (g >= n) detail::fail(ErrorKind::ShapeMismatch, "generator index out of range");
  }
  std::vector<int> raw(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best = 0;
    double best_d = d2(i, gens.indices[0]);
    for (std::size_t g = 1; g < gens.size(); ++g) {
      const double d = d2(i, gens.indices[g]);
      if (d < best_d) {
        best_d = d;
        best = g;
      }
    }
    raw[i] = static_cast<int>(best);
  }
  return Partition::from_labels(raw);
}

inline Partition voronoi_assign(const DataMatrix& data, const GeneratorSet& gens) {
  return voronoi_assign(SquaredDistances(data), gens);
}

struct LloydOptions {
  std::size_t max_iter = 100;
  double tol = 1e-6;
};

struct LloydResult {
  Partition partition;
  RowMatrix centers;
  std::vector<double> wcss;  // after each completed iteration
  std::size_t iterations = 0;
  bool converged = false;
};

namespace detail {

inline std::vector<int> nearest_center(const DataMatrix& data, const RowMatrix& centers) {
  std::vector<int> labels(data.n());
  for (std::size_t i = 0; i < data.n(); ++i) {
    Eigen::Index best = 0;
    (centers.rowwise() - data.row(i)).rowwise().squaredNorm().minCoeff(&best);
    labels[i] = static_cast<int>(best);
  }
  return labels;
}

inline double wcss(const DataMatrix& data, const RowMatrix& centers, const std::vector<int>& labels) {
  double s = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i) s += (data.row(i) - centers.row(labels[i])).squaredNorm();
  return s;
}

}  // namespace detail

/// Lloyd iterations from the given centers: assign to the nearest center, move
/// each center to its cluster mean, stop once no center moves more than `tol`
/// (Euclidean) or after max_iter rounds. Centers that lose all their points are dropped.
inline LloydResult lloyd_kmeans(const DataMatrix& data, RowMatrix centers, const LloydOptions& opts = {}) {
  if (centers.rows() < 1 || static_cast<std::size_t>(centers.rows()) > data.n())
    detail::fail(ErrorKind::Config, "lloyd_kmeans needs between 1 and n initial centers");
  if (static_cast<std::size_t>(centers.cols()) != data.p())
    detail::fail(ErrorKind::ShapeMismatch, "center dimension does not match data");
  if (opts.max_iter < 1) detail::fail(ErrorKind::Config, "max_iter must be at least 1");

  LloydResult out;
  std::vector<int> labels;
  for (std::size_t it = 0; it < opts.max_iter; ++it) {
    labels = detail::nearest_center(data, centers);

    const Eigen::Index k = centers.rows();
    RowMatrix sums = RowMatrix::Zero(k, centers.cols());
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < data.n(); ++i) {
      sums.row(labels[i]) += data.row(i);
      ++counts[static_cast<std::size_t>(labels[i])];
    }

    // Drop empty clusters and remap labels onto the survivors.
    std::vector<int> remap(static_cast<std::size_t>(k), -1);
    Eigen::Index kept = 0;
    double movement = 0.0;
    RowMatrix next(k, centers.cols());
    for (Eigen::Index c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] == 0) continue;
      next.row(kept) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
      movement = std::max(movement, (next.row(kept) - centers.row(c)).norm());
      remap[static_cast<std::size_t>(c)] = static_cast<int>(kept++);
    }
    next.conservativeResize(kept, Eigen::NoChange);
    for (int& l : labels) l = remap[static_cast<std::size_t>(l)];
    centers = std::move(next);

    out.wcss.push_back(detail::wcss(data, centers, labels));
    out.iterations = it + 1;
    if (movement <= opts.tol) {
      out.converged = true;
      break;
    }
  }
  out.partition = Partition::from_labels(labels);
  out.centers = std::move(centers);
  return out;
}

}  // namespace cdpp
