#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "cdpp/error.hpp"

namespace cdpp {

// Pair-counting statistics of two labelings, from their contingency table.
struct ContingencyTable {
  std::vector<std::vector<std::uint64_t>> counts;  // rows: labels_a clusters, cols: labels_b clusters
  std::vector<std::uint64_t> row_sums;
  std::vector<std::uint64_t> col_sums;
  std::uint64_t n = 0;
};

template <typename A, typename B>
ContingencyTable contingency(std::span<const A> labels_a, std::span<const B> labels_b) {
  if (labels_a.size() != labels_b.size()) detail::fail(ErrorKind::ShapeMismatch, "label vectors differ in length");
  std::map<A, std::size_t> ra;
  std::map<B, std::size_t> rb;
  for (const auto& v : labels_a) ra.try_emplace(v, ra.size());
  for (const auto& v : labels_b) rb.try_emplace(v, rb.size());
  ContingencyTable t;
  t.n = labels_a.size();
  t.counts.assign(ra.size(), std::vector<std::uint64_t>(rb.size(), 0));
  t.row_sums.assign(ra.size(), 0);
  t.col_sums.assign(rb.size(), 0);
  for (std::size_t i = 0; i < labels_a.size(); ++i) {
    const std::size_t r = ra[labels_a[i]];
    const std::size_t c = rb[labels_b[i]];
    ++t.counts[r][c];
    ++t.row_sums[r];
    ++t.col_sums[c];
  }
  return t;
}

// ARI as an exact fraction numerator / denominator, both scaled by 2 C(n, 2).
struct AriFraction {
  __int128 numerator = 0;
  __int128 denominator = 0;

  double value() const {
    if (denominator == 0) return 1.0;
    return static_cast<double>(numerator) / static_cast<double>(denominator);
  }
};

inline AriFraction ari_fraction(const ContingencyTable& t) {
  if (t.n < 2) detail::fail(ErrorKind::Config, "ARI needs at least two observations");
  auto pairs = [](std::uint64_t m) -> __int128 { return m < 2 ? 0 : static_cast<__int128>(m) * (m - 1) / 2; };
  __int128 index = 0;
  for (const auto& row : t.counts)
    for (auto c : row) index += pairs(c);
  __int128 a = 0;
  __int128 b = 0;
  for (auto s : t.row_sums) a += pairs(s);
  for (auto s : t.col_sums) b += pairs(s);
  const __int128 total = pairs(t.n);
  // [index - a b / N] / [(a + b) / 2 - a b / N], multiplied through by 2N.
  AriFraction f;
  f.numerator = 2 * (index * total - a * b);
  f.denominator = (a + b) * total - 2 * a * b;
  if (f.denominator == 0) f.numerator = 0;  // both single-cluster or both all-singletons
  return f;
}

/// Adjusted Rand index; 1 for identical partitions up to relabelling.
template <typename A, typename B>
double ari(std::span<const A> labels_a, std::span<const B> labels_b) {
  return ari_fraction(contingency(labels_a, labels_b)).value();
}

inline double ari(const std::vector<int>& a, const std::vector<int>& b) {
  return ari(std::span<const int>(a), std::span<const int>(b));
}

/// Relative square-root difference (sqrt(g_hat) - sqrt(g_true)) / sqrt(g_true).
inline double rn(std::size_t g_hat, std::size_t g_true) {
  if (g_hat < 1 || g_true < 1) detail::fail(ErrorKind::Config, "cluster counts must be positive");
  const double t = std::sqrt(static_cast<double>(g_true));
  return (std::sqrt(static_cast<double>(g_hat)) - t) / t;
}

}  // namespace cdpp
