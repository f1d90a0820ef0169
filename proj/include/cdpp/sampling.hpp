#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cdpp/data.hpp"
#include "cdpp/error.hpp"
#include "cdpp/kernel.hpp"
#include "cdpp/rng.hpp"

namespace cdpp {

enum class SamplerKind { Dpp, Uniform, KMeansPP };

inline const char* to_string(SamplerKind k) noexcept {
  switch (k) {
    case SamplerKind::Dpp: return "dpp";
    case SamplerKind::Uniform: return "uniform";
    case SamplerKind::KMeansPP: return "kmeanspp";
  }
  return "unknown";
}

// Generator points of one Voronoi diagram, as distinct observation indices.
struct GeneratorSet {
  std::vector<std::size_t> indices;
  SamplerKind method = SamplerKind::Dpp;

  std::size_t size() const noexcept { return indices.size(); }
};

struct BaselineConfig {
  std::size_t k_max = 2;
};

// 2 * ceil(sqrt(n / 2)), clamped to [2, n].
inline std::size_t default_k_max(std::size_t n) {
  const auto k = static_cast<std::size_t>(2.0 * std::ceil(std::sqrt(static_cast<double>(n) / 2.0)));
  return std::clamp<std::size_t>(k, 2, std::max<std::size_t>(n, 2));
}

struct DppOptions {
  // Phase-one draws that select fewer eigenvectors than this are redrawn.
  std::size_t min_size = 2;
  std::size_t max_attempts = 1000;
};

namespace detail {

// Index drawn with probability weights[i] / total. Entries with zero weight are never returned.
inline std::size_t sample_discrete(std::span<const double> weights, double total, RngStream& rng) {
  const double u = rng.uniform() * total;
  double acc = 0.0;
  std::size_t last_positive = weights.size();
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last_positive = i;
    if (u < acc) return i;
  }
  if (last_positive == weights.size()) fail(ErrorKind::NumericalFailure, "all sampling weights are zero");
  return last_positive;
}

}  // namespace detail

/// Exact DPP draw by the spectral mixture construction.
///
/// Phase one keeps eigenvector i independently with probability
/// lambda_i / (lambda_i + 1), which selects the elementary DPP with its mixture
/// weight. Phase two draws one point per kept eigenvector from the projection
/// DPP spanned by them: a point is picked with probability proportional to the
/// squared row norm of the current basis, then the basis is restricted to the
/// subspace orthogonal to that point's coordinate direction and re-orthonormalised.
inline GeneratorSet sample_dpp(const SpectralDecomposition& spec, RngStream& rng, const DppOptions& opts = {}) {
  const auto n = static_cast<Eigen::Index>(spec.n());
  std::vector<Eigen::Index> chosen_vectors;
  std::size_t attempts = 0;
  for (;;) {
    chosen_vectors.clear();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double lambda = spec.eigenvalues(i);
      if (rng.uniform() < lambda / (lambda + 1.0)) chosen_vectors.push_back(i);
    }
    if (chosen_vectors.size() >= opts.min_size) break;
    if (++attempts >= opts.max_attempts) {
      detail::fail(ErrorKind::ResampleExhausted,
                   "DPP draw stayed below " + std::to_string(opts.min_size) + " points for " +
                       std::to_string(opts.max_attempts) + " consecutive attempts");
    }
  }

  const auto k = static_cast<Eigen::Index>(chosen_vectors.size());
  Matrix basis(n, k);
  for (Eigen::Index c = 0; c < k; ++c) basis.col(c) = spec.eigenvectors.col(chosen_vectors[static_cast<std::size_t>(c)]);

  GeneratorSet out;
  out.method = SamplerKind::Dpp;
  out.indices.reserve(static_cast<std::size_t>(k));
  std::vector<double> weights(static_cast<std::size_t>(n));
  std::vector<char> taken(static_cast<std::size_t>(n), 0);

  for (Eigen::Index remaining = k; remaining > 0; --remaining) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double w = taken[static_cast<std::size_t>(i)] ? 0.0 : basis.row(i).squaredNorm();
      weights[static_cast<std::size_t>(i)] = w;
      total += w;
    }
    const auto pick = static_cast<Eigen::Index>(detail::sample_discrete(weights, total, rng));
    out.indices.push_back(static_cast<std::size_t>(pick));
    taken[static_cast<std::size_t>(pick)] = 1;
    if (remaining == 1) break;

    // Eliminate the picked coordinate using the column with the largest entry there.
    Eigen::Index pivot = 0;
    basis.row(pick).cwiseAbs().maxCoeff(&pivot);
    const Vector pivot_col = basis.col(pivot) / basis(pick, pivot);
    for (Eigen::Index c = 0; c < remaining; ++c) {
      if (c != pivot) basis.col(c) -= pivot_col * basis(pick, c);
    }
    if (pivot != remaining - 1) basis.col(pivot) = basis.col(remaining - 1);
    basis.conservativeResize(Eigen::NoChange, remaining - 1);

    // Modified Gram-Schmidt.
    for (Eigen::Index a = 0; a < basis.cols(); ++a) {
      for (Eigen::Index b = 0; b < a; ++b) basis.col(a) -= basis.col(b).dot(basis.col(a)) * basis.col(b);
      const double norm = basis.col(a).norm();
      if (!(norm > 1e-12)) detail::fail(ErrorKind::NumericalFailure, "projection basis lost rank during DPP sampling");
      basis.col(a) /= norm;
    }
  }
  return out;
}

/// log P(Y) = log det(L_Y) - log det(L + I) under DPP(L). `log_det_l_plus_i`
/// is computed once from the eigenvalues. A numerically singular L_Y gives -inf.
inline double dpp_log_likelihood(const KernelMatrix& l, const GeneratorSet& y, double log_det_l_plus_i) {
  const std::size_t n = l.n();
  const auto m = static_cast<Eigen::Index>(y.size());
  if (m == 0) detail::fail(ErrorKind::Config, "log-likelihood needs a nonempty subset");
  Matrix sub(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    const std::size_t ia = y.indices[static_cast<std::size_t>(a)];
    if (ia >= n) detail::fail(ErrorKind::ShapeMismatch, "subset index out of range");
    for (Eigen::Index b = 0; b < m; ++b) sub(a, b) = l(ia, y.indices[static_cast<std::size_t>(b)]);
  }
  const double scale = sub.diagonal().cwiseAbs().maxCoeff();
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (!(scale > 0.0)) return kNegInf;

  Eigen::LLT<Matrix> llt(sub);
  if (llt.info() != Eigen::Success) return kNegInf;
  double log_det = 0.0;
  const Matrix& factor = llt.matrixLLT();
  for (Eigen::Index i = 0; i < m; ++i) {
    const double pivot2 = factor(i, i) * factor(i, i);
    if (!(pivot2 > 1e-13 * scale)) return kNegInf;
    log_det += std::log(pivot2);
  }
  return log_det - log_det_l_plus_i;
}

inline double dpp_log_likelihood(const KernelMatrix& l, const GeneratorSet& y, const SpectralDecomposition& spec) {
  return dpp_log_likelihood(l, y, spec.log_det_l_plus_i());
}

/// Uniform baseline: k uniform on {2, ..., k_max}, then a uniform k-subset of {0, ..., n-1}.
inline GeneratorSet sample_uniform(std::size_t n, const BaselineConfig& cfg, RngStream& rng) {
  if (cfg.k_max < 2 || cfg.k_max > n) detail::fail(ErrorKind::Config, "k_max must lie in [2, n]");
  const auto k = static_cast<std::size_t>(rng.uniform_int(2, cfg.k_max));
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(i, n - 1));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return GeneratorSet{std::move(pool), SamplerKind::Uniform};
}

/// k-means++ seeding. The first center is uniform over the observations; each
/// further one is drawn with probability proportional to its squared distance
/// to the nearest center chosen so far.
inline GeneratorSet kmeanspp_init(const SquaredDistances& d2, std::size_t k, RngStream& rng) {
  const std::size_t n = d2.n();
  if (k < 1 || k > n) detail::fail(ErrorKind::Config, "k-means++ needs 1 <= k <= n");
  GeneratorSet out;
  out.method = SamplerKind::KMeansPP;
  out.indices.reserve(k);
  const auto first = static_cast<std::size_t>(rng.uniform_int(0, n - 1));
  out.indices.push_back(first);

  std::vector<double> nearest(n);
  for (std::size_t i = 0; i < n; ++i) nearest[i] = d2(i, first);
  while (out.indices.size() < k) {
    const double total = std::accumulate(nearest.begin(), nearest.end(), 0.0);
    if (!(total > 0.0)) {
      detail::fail(ErrorKind::DegenerateData,
                   "fewer than " + std::to_string(k) + " distinct points available for k-means++");
    }
    const std::size_t next = detail::sample_discrete(nearest, total, rng);
    out.indices.push_back(next);
    for (std::size_t i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], d2(i, next));
  }
  return out;
}

inline GeneratorSet kmeanspp_init(const DataMatrix& data, std::size_t k, RngStream& rng) {
  return kmeanspp_init(SquaredDistances(data), k, rng);
}

// Coordinates of the generator points, one per row.
inline RowMatrix gather_rows(const DataMatrix& data, const GeneratorSet& gens) {
  RowMatrix out(static_cast<Eigen::Index>(gens.size()), static_cast<Eigen::Index>(data.p()));
  for (std::size_t r = 0; r < gens.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = data.row(gens.indices[r]);
  return out;
}

}  // namespace cdpp
