#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cdpp/consensus.hpp"
#include "cdpp/error.hpp"
#include "cdpp/kernel.hpp"

namespace cdpp {

// Kernel-space scatter of a clustering. All quantities are evaluated through
// kernel sums only; no explicit feature map is ever formed.
struct ScatterReport {
  double v_s = 0.0;                    // mean distance of mapped points to the global mapped mean
  std::vector<double> w_per_cluster;   // same, within each cluster
  double w_v = 0.0;                    // sum_k W_k / (K V_S)
  Matrix b_pairwise;                   // squared distances between mapped cluster means
  double b_v = 0.0;                    // size-weighted mean of the (unsquared) between distances
  std::vector<std::size_t> sizes;
  std::vector<std::string> warnings;
};

inline ScatterReport scatter(const KernelMatrix& l, const Partition& part) {
  const std::size_t n = l.n();
  if (part.n() != n) detail::fail(ErrorKind::ShapeMismatch, "clustering length does not match kernel size");
  const std::size_t k = part.k();
  if (k < 2) detail::fail(ErrorKind::Config, "scatter needs at least two clusters");
  const auto& labels = part.labels();
  const auto kk = static_cast<Eigen::Index>(k);
  const Matrix& e = l.entries();

  // row_sums(i, c) = sum_{j in c} L_ij ; block(c, d) = sum_{i in c, j in d} L_ij
  Matrix row_sums = Matrix::Zero(static_cast<Eigen::Index>(n), kk);
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(n); ++j) {
    const Eigen::Index c = labels[static_cast<std::size_t>(j)];
    row_sums.col(c) += e.col(j);
  }
  Matrix block = Matrix::Zero(kk, kk);
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) block.row(labels[static_cast<std::size_t>(i)]) += row_sums.row(i);
  const Vector total_rows = row_sums.rowwise().sum();
  const double total = block.sum();

  ScatterReport r;
  r.sizes = part.sizes();
  const double nd = static_cast<double>(n);
  double vs = 0.0;
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
    const double term = e(i, i) - 2.0 * total_rows(i) / nd + total / (nd * nd);
    vs += std::sqrt(std::max(0.0, term));
  }
  r.v_s = vs / nd;

  r.w_per_cluster.assign(k, 0.0);
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
    const Eigen::Index c = labels[static_cast<std::size_t>(i)];
    const double nc = static_cast<double>(r.sizes[static_cast<std::size_t>(c)]);
    const double term = e(i, i) - 2.0 * row_sums(i, c) / nc + block(c, c) / (nc * nc);
    r.w_per_cluster[static_cast<std::size_t>(c)] += std::sqrt(std::max(0.0, term));
  }
  double w_sum = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    r.w_per_cluster[c] /= static_cast<double>(r.sizes[c]);
    w_sum += r.w_per_cluster[c];
    if (r.sizes[c] == 1) r.warnings.push_back("SingletonClusterWarning: cluster " + std::to_string(c) + " has one member");
  }
  r.w_v = r.v_s > 0.0 ? w_sum / (static_cast<double>(k) * r.v_s) : 0.0;

  r.b_pairwise = Matrix::Zero(kk, kk);
  double weighted = 0.0;
  double weights = 0.0;
  for (Eigen::Index a = 0; a < kk; ++a) {
    const double na = static_cast<double>(r.sizes[static_cast<std::size_t>(a)]);
    for (Eigen::Index b = a + 1; b < kk; ++b) {
      const double nb = static_cast<double>(r.sizes[static_cast<std::size_t>(b)]);
      const double b2 = std::max(0.0, block(a, a) / (na * na) - 2.0 * block(a, b) / (na * nb) + block(b, b) / (nb * nb));
      r.b_pairwise(a, b) = b2;
      r.b_pairwise(b, a) = b2;
      weighted += na * nb * std::sqrt(b2);
      weights += na * nb;
    }
  }
  r.b_v = weighted / weights;
  return r;
}

inline ScatterReport scatter(const KernelMatrix& l, const Clustering& clustering) { return scatter(l, clustering.partition); }

/// SR = 1 - n/(n-1) * W_V / (W_V + B_V); larger is better.
inline double similarity_ratio(const ScatterReport& report, std::size_t n) {
  const double denom = report.w_v + report.b_v;
  if (!(denom > 0.0)) detail::fail(ErrorKind::DegenerateScatter, "W_V + B_V is zero");
  if (n < 2) detail::fail(ErrorKind::Config, "similarity ratio needs n >= 2");
  const double nd = static_cast<double>(n);
  return 1.0 - (nd / (nd - 1.0)) * (report.w_v / denom);
}

inline constexpr double kMinBetweenDistance = 1e-12;

/// (B_max / B_min) * sum over ordered pairs i != j of 1 / B^2(V_i, V_j), with
/// B_max / B_min the extreme off-diagonal squared distances. Empty when some
/// squared distance is at or below kMinBetweenDistance.
inline std::optional<double> between_penalty(const ScatterReport& report) {
  const Eigen::Index k = report.b_pairwise.rows();
  double b_max = 0.0;
  double b_min = std::numeric_limits<double>::infinity();
  double inv_sum = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      if (i == j) continue;
      const double b2 = report.b_pairwise(i, j);
      if (!(b2 > kMinBetweenDistance)) return std::nullopt;
      b_max = std::max(b_max, b2);
      b_min = std::min(b_min, b2);
      inv_sum += 1.0 / b2;
    }
  }
  return (b_max / b_min) * inv_sum;
}

struct CandidateScore {
  std::size_t k = 0;
  double threshold = 0.0;
  bool merged = false;
  double w_v = 0.0;
  double b_v = 0.0;
  double sr = std::numeric_limits<double>::quiet_NaN();
  double b_tilde = std::numeric_limits<double>::quiet_NaN();
  double kvi = std::numeric_limits<double>::quiet_NaN();
  bool excluded = false;
  std::string reason;
};

struct SelectionResult {
  Clustering chosen;
  std::size_t chosen_index = 0;  // into `scores`
  std::vector<CandidateScore> scores;
  double alpha = 0.0;
};

struct ScoredCandidate {
  Clustering clustering;
  ScatterReport report;
};

/// Kernel validation index KVI = alpha * W_V + B~_V, where alpha is the B~ of
/// the candidate with the most clusters (ties: lowest threshold). Picks the
/// minimum; ties prefer more clusters, then the lower threshold. Candidates with
/// a vanishing between-cluster distance are excluded.
inline SelectionResult kvi(const std::vector<ScoredCandidate>& candidates) {
  if (candidates.empty()) detail::fail(ErrorKind::NoCandidates, "no candidate clusterings to score");
  SelectionResult out;
  out.scores.reserve(candidates.size());
  for (const auto& c : candidates) {
    CandidateScore s;
    s.k = c.clustering.k();
    s.threshold = c.clustering.threshold;
    s.merged = c.clustering.merged;
    s.w_v = c.report.w_v;
    s.b_v = c.report.b_v;
    if (s.k < 2) {
      s.excluded = true;
      s.reason = "single cluster";
    } else {
      const std::size_t n = c.clustering.partition.n();
      if (c.report.w_v + c.report.b_v > 0.0) s.sr = similarity_ratio(c.report, n);
      if (auto bt = between_penalty(c.report)) {
        s.b_tilde = *bt;
      } else {
        s.excluded = true;
        s.reason = "ZeroBetweenDistance: some squared between-cluster distance <= 1e-12";
      }
    }
    out.scores.push_back(std::move(s));
  }

  std::optional<std::size_t> widest;
  for (std::size_t i = 0; i < out.scores.size(); ++i) {
    const auto& s = out.scores[i];
    if (s.excluded) continue;
    if (!widest || s.k > out.scores[*widest].k ||
        (s.k == out.scores[*widest].k && s.threshold < out.scores[*widest].threshold))
      widest = i;
  }
  if (!widest) detail::fail(ErrorKind::NoCandidates, "every candidate was excluded from KVI selection");
  out.alpha = out.scores[*widest].b_tilde;

  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < out.scores.size(); ++i) {
    auto& s = out.scores[i];
    if (s.excluded) continue;
    s.kvi = out.alpha * s.w_v + s.b_tilde;
    if (!best) {
      best = i;
      continue;
    }
    const auto& b = out.scores[*best];
    if (s.kvi < b.kvi || (s.kvi == b.kvi && (s.k > b.k || (s.k == b.k && s.threshold < b.threshold)))) best = i;
  }
  out.chosen_index = *best;
  out.chosen = candidates[*best].clustering;
  return out;
}

/// Scores every candidate against L and selects by KVI.
inline SelectionResult select_clustering(const KernelMatrix& l, const std::vector<Clustering>& candidates) {
  std::vector<ScoredCandidate> scored;
  scored.reserve(candidates.size());
  for (const auto& c : candidates) scored.push_back({c, scatter(l, c)});
  return kvi(scored);
}

}  // namespace cdpp
