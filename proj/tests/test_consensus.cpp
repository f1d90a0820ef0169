#include <cmath>

#include <gtest/gtest.h>

#include "cdpp/consensus.hpp"
#include "cdpp/metrics.hpp"
#include "oracles.hpp"

using namespace cdpp;

namespace {

Partition part(std::vector<int> labels) { return Partition::from_labels(labels); }

Matrix random_consensus(std::size_t n, RngStream& rng) {
  // Sparse random proportions on a grid of 1/20, all below 1.
  Matrix c = Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < c.cols(); ++j) {
      const double v = rng.uniform() < 0.9 ? 0.0 : static_cast<double>(rng.uniform_int(0, 19)) / 20.0;
      c(i, j) = v;
      c(j, i) = v;
    }
  }
  return c;
}

}  // namespace

TEST(Accumulate, SingleRunIsBinaryCoMembership) {
  const auto c = accumulate(std::vector<Partition>{part({0, 0, 1, 1, 0})}, 5);
  EXPECT_EQ(c(0, 1), 1.0);
  EXPECT_EQ(c(0, 4), 1.0);
  EXPECT_EQ(c(0, 2), 0.0);
  EXPECT_EQ(c(2, 3), 1.0);
  EXPECT_EQ(c(3, 3), 1.0);
}

TEST(Accumulate, TwoRunArithmetic) {
  const auto c = accumulate(std::vector<Partition>{part({0, 0, 1}), part({0, 0, 0})}, 3);
  EXPECT_EQ(c(0, 1), 1.0);
  EXPECT_EQ(c(0, 2), 0.5);
  EXPECT_EQ(c(2, 1), 0.5);
  EXPECT_EQ(c.runs(), 2u);
}

TEST(Accumulate, AllSingletonsGiveIdentity) {
  const auto c = accumulate(std::vector<Partition>(4, part({0, 1, 2, 3})), 4);
  EXPECT_EQ(c.entries(), Matrix::Identity(4, 4));
}

TEST(Accumulate, MergingPartialCountsMatchesSequential) {
  RngStream rng(5, 0);
  std::vector<Partition> runs;
  for (int r = 0; r < 30; ++r) {
    std::vector<int> l(25);
    for (auto& v : l) v = static_cast<int>(rng.uniform_int(0, 3));
    runs.push_back(part(l));
  }
  ConsensusCounts a(25), b(25);
  for (int r = 0; r < 30; ++r) (r % 3 == 0 ? a : b).add(runs[static_cast<std::size_t>(r)]);
  b.merge(a);
  EXPECT_EQ(ConsensusMatrix(b).entries(), accumulate(runs, 25).entries());
}

TEST(Accumulate, RejectsMismatchAndEmpty) {
  EXPECT_THROW(accumulate(std::vector<Partition>{part({0, 1})}, 3), Error);
  EXPECT_THROW(accumulate(std::vector<Partition>{}, 3), Error);
}

TEST(Thresholds, DefaultGrid) {
  const auto t = default_thresholds(0.6);
  ASSERT_EQ(t.size(), 8u);
  EXPECT_DOUBLE_EQ(t.front(), 0.6);
  EXPECT_DOUBLE_EQ(t.back(), 0.95);
  EXPECT_EQ(min_cluster_size(150, 0.5), 13u);
  EXPECT_EQ(min_cluster_size(100, 0.5), 10u);
}

TEST(Thresholds, ValidationRejectsBadConfig) {
  ConsensusConfig cfg;
  cfg.tau = 1.0;
  EXPECT_THROW(validate(cfg), Error);
  cfg = {};
  cfg.thresholds = {0.7, 0.65};
  EXPECT_THROW(validate(cfg), Error);
  cfg.thresholds = {0.5};
  EXPECT_THROW(validate(cfg), Error);
}

TEST(Components, ZeroThresholdIsOneComponentAndAboveMaxIsSingletons) {
  RngStream rng(6, 0);
  const auto c = ConsensusMatrix::from_dense(random_consensus(30, rng));
  EXPECT_EQ(threshold_components(c, 0.0).k(), 1u);
  Matrix off = c.entries();
  off.diagonal().setZero();
  const double above = std::nextafter(off.maxCoeff(), 2.0);
  EXPECT_EQ(threshold_components(c, above).k(), 30u);
}

TEST(Components, SingleEdge) {
  Matrix m = Matrix::Identity(3, 3);
  m(0, 1) = m(1, 0) = 0.8;
  m(1, 2) = m(2, 1) = 0.3;
  EXPECT_EQ(threshold_components(ConsensusMatrix::from_dense(m), 0.6).labels(), (std::vector<int>{0, 0, 1}));
}

TEST(Components, AgreeWithBreadthFirstSearch) {
  RngStream rng(7, 0);
  for (int t = 0; t < 20; ++t) {
    const auto m = random_consensus(10 + rng.uniform_int(0, 60), rng);
    const auto c = ConsensusMatrix::from_dense(m);
    for (double theta : {0.3, 0.6, 0.85}) {
      EXPECT_EQ(threshold_components(c, theta).labels(), oracle::bfs_components(m, theta));
    }
  }
}

TEST(Components, MonotoneInThreshold) {
  RngStream rng(8, 0);
  const auto c = ConsensusMatrix::from_dense(random_consensus(50, rng));
  std::size_t prev = 0;
  for (double theta = 0.0; theta <= 1.0; theta += 0.05) {
    const std::size_t k = threshold_components(c, theta).k();
    EXPECT_GE(k, prev);
    prev = k;
  }
}

TEST(MergeSmall, NoOpWhenLargeEnough) {
  Matrix m = Matrix::Identity(4, 4);
  const auto p = part({0, 0, 1, 1});
  const auto out = merge_small(p, ConsensusMatrix::from_dense(m), 2);
  EXPECT_EQ(out.partition, p);
  EXPECT_FALSE(out.merged);
}

TEST(MergeSmall, SingletonJoinsItsStrongestNeighbour) {
  // components {0,1,2,3} and {4}; strongest cross link is C_{4,2}
  Matrix m = Matrix::Identity(5, 5);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != j) m(i, j) = 0.9;
  m(4, 2) = m(2, 4) = 0.4;
  m(4, 0) = m(0, 4) = 0.1;
  const auto out = merge_small(part({0, 0, 0, 0, 1}), ConsensusMatrix::from_dense(m), 2);
  EXPECT_EQ(out.partition.k(), 1u);
  EXPECT_TRUE(out.merged);
}

TEST(MergeSmall, PicksTheStrongerOfTwoTargets) {
  // {0,1}, {2,3}, {4}: point 4 links 0.3 to block A and 0.5 to block B
  Matrix m = Matrix::Identity(5, 5);
  m(0, 1) = m(1, 0) = 1.0;
  m(2, 3) = m(3, 2) = 1.0;
  m(4, 1) = m(1, 4) = 0.3;
  m(4, 3) = m(3, 4) = 0.5;
  const auto out = merge_small(part({0, 0, 1, 1, 2}), ConsensusMatrix::from_dense(m), 2);
  EXPECT_EQ(out.partition.labels(), (std::vector<int>{0, 0, 1, 1, 1}));
}

TEST(MergeSmall, TiesBreakTowardsTheLowestPair) {
  // point 4 links equally to 1 and 3; pair (4,1) is lexicographically first
  Matrix m = Matrix::Identity(5, 5);
  m(0, 1) = m(1, 0) = 1.0;
  m(2, 3) = m(3, 2) = 1.0;
  m(4, 1) = m(1, 4) = 0.5;
  m(4, 3) = m(3, 4) = 0.5;
  const auto out = merge_small(part({0, 0, 1, 1, 2}), ConsensusMatrix::from_dense(m), 2);
  EXPECT_EQ(out.partition.labels(), (std::vector<int>{0, 0, 1, 1, 0}));
}

TEST(MergeSmall, ChainsUntilEveryClusterIsLargeEnough) {
  Matrix m = Matrix::Identity(6, 6);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) m(i, j) = 1.0;
  m(3, 4) = m(4, 3) = 0.2;
  m(4, 5) = m(5, 4) = 0.2;
  m(3, 0) = m(0, 3) = 0.1;
  const auto out = merge_small(part({0, 0, 0, 1, 2, 3}), ConsensusMatrix::from_dense(m), 3);
  for (auto s : out.partition.sizes()) EXPECT_GE(s, 3u);
}

TEST(Candidates, BlockDiagonalYieldsTheBlocks) {
  Matrix m = Matrix::Identity(9, 9);
  for (int b = 0; b < 3; ++b)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(3 * b + i, 3 * b + j) = 1.0;
  const auto set = candidate_clusterings(ConsensusMatrix::from_dense(m), ConsensusConfig{});
  ASSERT_EQ(set.candidates.size(), 1u);  // every threshold gives the same partition
  EXPECT_EQ(set.candidates[0].k(), 3u);
  EXPECT_DOUBLE_EQ(set.candidates[0].threshold, 0.6);
  EXPECT_EQ(set.table.size(), 8u);
}

TEST(Candidates, DistinctThresholdPartitionsAreKept) {
  Matrix m = Matrix::Identity(8, 8);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      m(i, j) = m(i + 4, j + 4) = 1.0;
    }
  m(1, 2) = m(2, 1) = 0.65;  // splits block {0..3} above 0.65
  for (int i : {0, 1})
    for (int j : {2, 3}) m(i, j) = m(j, i) = 0.65;
  ConsensusConfig cfg;
  cfg.a = 0.3;  // min size ceil(8^0.3) = 2
  const auto set = candidate_clusterings(ConsensusMatrix::from_dense(m), cfg);
  ASSERT_EQ(set.candidates.size(), 2u);
  EXPECT_EQ(set.candidates[0].k(), 2u);
  EXPECT_EQ(set.candidates[1].k(), 3u);
  EXPECT_DOUBLE_EQ(set.candidates[1].threshold, 0.7);
}

TEST(Candidates, AllSingleClusterRaisesNoCandidates) {
  const auto c = ConsensusMatrix::from_dense(Matrix::Ones(5, 5));
  try {
    candidate_clusterings(c, ConsensusConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoCandidates);
  }
}
