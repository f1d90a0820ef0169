#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cdpp/data.hpp"
#include "cdpp/error.hpp"
#include "cdpp/partition.hpp"
#include "cdpp/union_find.hpp"

namespace cdpp {

// Integer co-membership counts over a set of runs. Counts from disjoint sets of
// runs merge by addition, so partial accumulations can be built in parallel and
// combined in any order with identical results.
class ConsensusCounts {
 public:
  explicit ConsensusCounts(std::size_t n) : n_(n), counts_(n * n, 0) {}

  std::size_t n() const noexcept { return n_; }
  std::size_t runs() const noexcept { return runs_; }

  void add(const Partition& part) {
    if (part.n() != n_) detail::fail(ErrorKind::ShapeMismatch, "partition length does not match consensus size");
    for (const auto& members : part.members()) {
      for (std::size_t a = 0; a < members.size(); ++a) {
        std::uint32_t* row = counts_.data() + members[a] * n_;
        for (std::size_t b = a + 1; b < members.size(); ++b) ++row[members[b]];
      }
    }
    ++runs_;
  }

  void merge(const ConsensusCounts& other) {
    if (other.n_ != n_) detail::fail(ErrorKind::ShapeMismatch, "cannot merge consensus counts of different sizes");
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
    runs_ += other.runs_;
  }

  // Number of runs in which i and j shared a cluster (i != j).
  std::uint32_t together(std::size_t i, std::size_t j) const noexcept {
    return i < j ? counts_[i * n_ + j] : counts_[j * n_ + i];
  }

 private:
  std::size_t n_;
  std::size_t runs_ = 0;
  std::vector<std::uint32_t> counts_;  // upper triangle of a row-major n x n array
};

// Proportion of runs in which each pair of observations fell in the same cluster.
class ConsensusMatrix {
 public:
  ConsensusMatrix() = default;

  explicit ConsensusMatrix(const ConsensusCounts& counts) : runs_(counts.runs()) {
    if (runs_ == 0) detail::fail(ErrorKind::Config, "consensus needs at least one run");
    const auto n = static_cast<Eigen::Index>(counts.n());
    entries_.resize(n, n);
    const double r = static_cast<double>(runs_);
    for (Eigen::Index i = 0; i < n; ++i) {
      entries_(i, i) = 1.0;
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double v = static_cast<double>(counts.together(static_cast<std::size_t>(i), static_cast<std::size_t>(j))) / r;
        entries_(i, j) = v;
        entries_(j, i) = v;
      }
    }
  }

  // Wraps a precomputed proportion matrix (symmetric, unit diagonal, entries in [0, 1]).
  static ConsensusMatrix from_dense(Matrix entries, std::size_t runs = 0) {
    if (entries.rows() != entries.cols()) detail::fail(ErrorKind::ShapeMismatch, "consensus matrix must be square");
    for (Eigen::Index i = 0; i < entries.rows(); ++i) {
      if (entries(i, i) != 1.0) detail::fail(ErrorKind::ShapeMismatch, "consensus diagonal must be 1");
      for (Eigen::Index j = i + 1; j < entries.cols(); ++j) {
        const double v = entries(i, j);
        if (v != entries(j, i) || !(v >= 0.0 && v <= 1.0))
          detail::fail(ErrorKind::ShapeMismatch, "consensus matrix must be symmetric with entries in [0, 1]");
      }
    }
    ConsensusMatrix c;
    c.entries_ = std::move(entries);
    c.runs_ = runs;
    return c;
  }

  std::size_t n() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
  std::size_t runs() const noexcept { return runs_; }
  const Matrix& entries() const noexcept { return entries_; }
  double operator()(std::size_t i, std::size_t j) const {
    return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

 private:
  std::size_t runs_ = 0;
  Matrix entries_;
};

inline ConsensusMatrix accumulate(std::span<const Partition> partitions, std::size_t n) {
  ConsensusCounts counts(n);
  for (const auto& p : partitions) counts.add(p);
  return ConsensusMatrix(counts);
}

inline ConsensusMatrix accumulate(const std::vector<Partition>& partitions, std::size_t n) {
  return accumulate(std::span<const Partition>(partitions), n);
}

struct ConsensusConfig {
  std::size_t runs = 200;
  double tau = 0.6;
  std::vector<double> thresholds;  // empty: derived from tau
  double a = 0.5;                  // minimal cluster size is ceil(n^a)
};

// tau, tau + 0.05, ... strictly below 1.
inline std::vector<double> default_thresholds(double tau) {
  std::vector<double> out;
  for (int i = 0;; ++i) {
    const double theta = std::round((tau + 0.05 * i) * 1e9) / 1e9;
    if (theta >= 1.0) break;
    out.push_back(theta);
  }
  return out;
}

inline std::vector<double> effective_thresholds(const ConsensusConfig& cfg) {
  return cfg.thresholds.empty() ? default_thresholds(cfg.tau) : cfg.thresholds;
}

inline void validate(const ConsensusConfig& cfg) {
  if (cfg.runs < 1) detail::fail(ErrorKind::Config, "runs must be at least 1");
  if (!(cfg.tau > 0.0 && cfg.tau < 1.0)) detail::fail(ErrorKind::Config, "tau must lie in (0, 1)");
  if (!(cfg.a > 0.0 && cfg.a < 1.0)) detail::fail(ErrorKind::Config, "minimal-size exponent a must lie in (0, 1)");
  const auto thresholds = effective_thresholds(cfg);
  if (thresholds.empty()) detail::fail(ErrorKind::Config, "threshold grid is empty");
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (thresholds[i] < cfg.tau || thresholds[i] > 1.0) detail::fail(ErrorKind::Config, "thresholds must lie in [tau, 1]");
    if (i > 0 && !(thresholds[i] > thresholds[i - 1])) detail::fail(ErrorKind::Config, "thresholds must be strictly ascending");
  }
}

inline std::size_t min_cluster_size(std::size_t n, double a) {
  const double raw = std::pow(static_cast<double>(n), a);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(raw - 1e-9)));
}

/// Connected components of the graph linking i != j whenever C_ij >= theta.
inline Partition threshold_components(const ConsensusMatrix& c, double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) detail::fail(ErrorKind::Config, "threshold must lie in [0, 1]");
  const std::size_t n = c.n();
  UnionFind uf(n);
  const Matrix& e = c.entries();
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(n); ++j) {
    for (Eigen::Index i = j + 1; i < static_cast<Eigen::Index>(n); ++i) {
      if (e(i, j) >= theta) uf.unite(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }
  }
  std::vector<std::size_t> roots(n);
  for (std::size_t i = 0; i < n; ++i) roots[i] = uf.find(i);
  return Partition::from_labels(std::span<const std::size_t>(roots));
}

// A consolidated clustering at one threshold.
struct Clustering {
  Partition partition;
  double threshold = 0.0;
  bool merged = false;

  std::size_t k() const noexcept { return partition.k(); }
  const std::vector<int>& labels() const noexcept { return partition.labels(); }
};

namespace detail {

struct Link {
  double value = -1.0;
  std::size_t i = 0;
  std::size_t j = 0;

  // Larger consensus first, then lexicographically smallest (i, j).
  bool better_than(const Link& o) const noexcept {
    if (value != o.value) return value > o.value;
    if (i != o.i) return i < o.i;
    return j < o.j;
  }
};

}  // namespace detail

/// Absorbs undersized components into their most strongly linked neighbour.
///
/// While some component has fewer than min_size members (and more than one
/// component remains): take the smallest one V (ties: the one holding the
/// lowest observation index), find the pair (i, j) with i in V, j outside V
/// that maximises C_ij (ties: lexicographically smallest), and merge V into
/// the component containing j.
inline Clustering merge_small(const Partition& components, const ConsensusMatrix& c, std::size_t min_size) {
  if (min_size < 1) detail::fail(ErrorKind::Config, "min_size must be at least 1");
  if (components.n() != c.n()) detail::fail(ErrorKind::ShapeMismatch, "partition and consensus sizes differ");
  const std::size_t k = components.k();
  auto sizes = components.sizes();

  Clustering out;
  out.partition = components;
  const bool needs_merge = k > 1 && std::any_of(sizes.begin(), sizes.end(), [&](std::size_t s) { return s < min_size; });
  if (!needs_merge) return out;

  // best[a * k + b]: strongest directed link from a member of a to a member of b.
  std::vector<detail::Link> best(k * k);
  const auto& labels = components.labels();
  const std::size_t n = c.n();
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = static_cast<std::size_t>(labels[i]);
    for (std::size_t j = 0; j < n; ++j) {
      const auto b = static_cast<std::size_t>(labels[j]);
      if (a == b) continue;
      detail::Link cand{c(i, j), i, j};
      if (cand.better_than(best[a * k + b])) best[a * k + b] = cand;
    }
  }

  std::vector<std::size_t> owner(k);  // component -> surviving component
  std::vector<std::size_t> min_member(k, n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& m = min_member[static_cast<std::size_t>(labels[i])];
    m = std::min(m, i);
  }
  std::vector<char> alive(k, 1);
  for (std::size_t a = 0; a < k; ++a) owner[a] = a;
  std::size_t alive_count = k;

  while (alive_count > 1) {
    std::size_t v = k;
    for (std::size_t a = 0; a < k; ++a) {
      if (!alive[a] || sizes[a] >= min_size) continue;
      if (v == k || sizes[a] < sizes[v] || (sizes[a] == sizes[v] && min_member[a] < min_member[v])) v = a;
    }
    if (v == k) break;

    std::size_t target = k;
    detail::Link link;
    for (std::size_t b = 0; b < k; ++b) {
      if (!alive[b] || b == v) continue;
      if (target == k || best[v * k + b].better_than(link)) {
        link = best[v * k + b];
        target = b;
      }
    }

    // Fold v into target.
    for (std::size_t x = 0; x < k; ++x) {
      if (!alive[x] || x == v || x == target) continue;
      auto& out_link = best[target * k + x];
      if (best[v * k + x].better_than(out_link)) out_link = best[v * k + x];
      auto& in_link = best[x * k + target];
      if (best[x * k + v].better_than(in_link)) in_link = best[x * k + v];
    }
    sizes[target] += sizes[v];
    min_member[target] = std::min(min_member[target], min_member[v]);
    alive[v] = 0;
    owner[v] = target;
    --alive_count;
  }

  auto resolve = [&](std::size_t a) {
    while (owner[a] != a) a = owner[a];
    return a;
  };
  std::vector<std::size_t> raw(n);
  for (std::size_t i = 0; i < n; ++i) raw[i] = resolve(static_cast<std::size_t>(labels[i]));
  out.partition = Partition::from_labels(std::span<const std::size_t>(raw));
  out.merged = true;
  return out;
}

struct ThresholdSummary {
  double threshold = 0.0;
  std::size_t components = 0;  // K before merging
  std::size_t clusters = 0;    // K after merging
  bool merged = false;
  bool kept = false;           // false: single cluster or duplicate of a lower threshold
};

struct CandidateSet {
  std::vector<Clustering> candidates;
  std::vector<ThresholdSummary> table;
};

/// Thresholds the consensus matrix at every grid value, merges undersized
/// components, drops single-cluster results and keeps only the lowest
/// threshold of each distinct partition. Throws NoCandidates when nothing remains.
inline CandidateSet candidate_clusterings(const ConsensusMatrix& c, const ConsensusConfig& cfg) {
  validate(cfg);
  const std::size_t n = c.n();
  const std::size_t min_size = min_cluster_size(n, cfg.a);
  CandidateSet out;
  for (double theta : effective_thresholds(cfg)) {
    const Partition comps = threshold_components(c, theta);
    Clustering cl = merge_small(comps, c, min_size);
    cl.threshold = theta;
    ThresholdSummary row{theta, comps.k(), cl.k(), cl.merged, false};
    if (cl.k() > 1) {
      const bool duplicate = std::any_of(out.candidates.begin(), out.candidates.end(),
                                         [&](const Clustering& prev) { return prev.partition == cl.partition; });
      if (!duplicate) {
        row.kept = true;
        out.candidates.push_back(std::move(cl));
      }
    }
    out.table.push_back(row);
  }
  if (out.candidates.empty()) {
    std::ostringstream msg;
    msg << "every threshold yields a single cluster after merging (min size " << min_size << "); theta:K =";
    for (const auto& row : out.table) msg << ' ' << row.threshold << ':' << row.components << "->" << row.clusters;
    detail::fail(ErrorKind::NoCandidates, msg.str());
  }
  return out;
}

}  // namespace cdpp
