#include <cmath>

#include <gtest/gtest.h>

#include "cdpp/simgen.hpp"
#include "oracles.hpp"

using namespace cdpp;

namespace {

MixtureModel two_components(double delta, double sigma, std::size_t p = 1) {
  MixtureModel m;
  Vector a = Vector::Zero(static_cast<Eigen::Index>(p));
  Vector b = a;
  b(0) = delta;
  m.means = {a, b};
  const Matrix cov = sigma * sigma * Matrix::Identity(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  m.covariances = {cov, cov};
  m.weights = {0.5, 0.5};
  return m;
}

}  // namespace

TEST(Grid, TwentyFourScenariosWithoutSmallNLargeK) {
  const auto grid = scenario_grid();
  ASSERT_EQ(grid.size(), 24u);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_EQ(grid[i].id, static_cast<int>(i));
    EXPECT_FALSE(grid[i].n == 150 && grid[i].k_level == Level::Large);
  }
  EXPECT_EQ(grid[0].n, 150u);
  EXPECT_EQ(grid[23].n, 1500u);
}

TEST(Grid, LevelRangesAndParsing) {
  EXPECT_EQ(dimension_range(Level::Medium).lo, 8u);
  EXPECT_EQ(dimension_range(Level::Large).hi, 20u);
  EXPECT_EQ(component_range(Level::Low).hi, 5u);
  EXPECT_EQ(parse_level("large"), Level::Large);
  EXPECT_THROW(parse_level("huge"), Error);
}

TEST(Overlap, ClosedFormInOneDimension) {
  for (double delta : {1.0, 2.0, 3.0}) {
    const auto model = two_components(delta, 1.0);
    RngStream rng(61, static_cast<std::uint64_t>(delta));
    const std::size_t m = 20000;
    const double est = estimate_overlap(model, 0, 1, m, rng);
    const double q = oracle::phi(-delta / 2.0);
    const double se = std::sqrt(2.0 * q * (1.0 - q) / static_cast<double>(m));
    EXPECT_NEAR(est, 2.0 * q, 3.0 * se + 1e-12) << "delta=" << delta;
  }
}

TEST(Overlap, IdenticalAndFarApartComponents) {
  RngStream rng(62, 0);
  EXPECT_NEAR(estimate_overlap(two_components(0.0, 1.0, 3), 0, 1, 10000, rng), 1.0, 0.03);
  EXPECT_EQ(estimate_overlap(two_components(100.0, 1.0, 3), 0, 1, 10000, rng), 0.0);
  EXPECT_THROW(estimate_overlap(two_components(1.0, 1.0), 0, 0, 10000, rng), Error);
  EXPECT_THROW(estimate_overlap(two_components(1.0, 1.0), 0, 1, 10, rng), Error);
}

TEST(Wishart, MeanIsDegreesOfFreedomTimesIdentity) {
  RngStream rng(63, 0);
  Matrix acc = Matrix::Zero(3, 3);
  const int draws = 4000;
  for (int t = 0; t < draws; ++t) {
    const Matrix w = detail::wishart_identity(3, 4.0, rng);
    EXPECT_EQ(Eigen::LLT<Matrix>(w).info(), Eigen::Success);
    acc += w;
  }
  acc /= draws;
  EXPECT_LE((acc - 4.0 * Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 0.3);
}

TEST(Weights, FlooredDirichletRespectsTheFloor) {
  RngStream rng(64, 0);
  for (int t = 0; t < 200; ++t) {
    const auto w = detail::floored_flat_dirichlet(5, 0.1, rng);
    double sum = 0.0;
    for (double v : w) {
      EXPECT_GE(v, 0.1);
      sum += v;
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(Weights, MultinomialCountsStayInTheBinomialBand) {
  RngStream rng(65, 0);
  const std::vector<double> w{0.2, 0.3, 0.5};
  const int reps = 2000;
  std::vector<double> mean(3, 0.0);
  for (int t = 0; t < reps; ++t) {
    const auto c = detail::multinomial(400, w, rng);
    EXPECT_EQ(c[0] + c[1] + c[2], 400u);
    for (int k = 0; k < 3; ++k) mean[static_cast<std::size_t>(k)] += static_cast<double>(c[static_cast<std::size_t>(k)]) / reps;
  }
  for (int k = 0; k < 3; ++k) {
    const double p = w[static_cast<std::size_t>(k)];
    const double se = std::sqrt(400.0 * p * (1 - p) / reps);
    EXPECT_NEAR(mean[static_cast<std::size_t>(k)], 400.0 * p, 4.0 * se);
  }
}

TEST(BalanceFloor, CappedForManyComponents) {
  EXPECT_EQ(balance_floor(150, 3), 15u);
  EXPECT_EQ(balance_floor(500, 20), 12u);
  EXPECT_EQ(balance_floor(1500, 20), 37u);
}

TEST(Generate, SingleComponent) {
  ScenarioSpec s;
  s.n = 50;
  s.k = 1;
  s.p = 3;
  RngStream rng(66, 0);
  const auto d = generate_mixture(s, rng);
  EXPECT_EQ(d.data.n(), 50u);
  EXPECT_EQ(d.data.p(), 3u);
  for (int l : d.true_labels) EXPECT_EQ(l, 0);
}

TEST(Generate, ScenarioContract) {
  ScenarioSpec s;
  s.n = 150;
  s.p_level = Level::Medium;
  s.k_level = Level::Low;
  RngStream rng(67, 0);
  const auto d = generate_mixture(s, rng);
  const std::size_t k = d.model.k();
  EXPECT_GE(k, 2u);
  EXPECT_LE(k, 5u);
  EXPECT_GE(d.data.p(), 8u);
  EXPECT_LE(d.data.p(), 12u);
  EXPECT_LE(d.max_overlap, s.max_pairwise_overlap);
  std::vector<std::size_t> counts(k, 0);
  for (int l : d.true_labels) ++counts[static_cast<std::size_t>(l)];
  EXPECT_EQ(counts, d.counts);
  for (auto c : counts) EXPECT_GE(c, balance_floor(150, k));
  for (const auto& cov : d.model.covariances) EXPECT_EQ(Eigen::LLT<Matrix>(cov).info(), Eigen::Success);
  // labels are shuffled, not sorted by component
  EXPECT_FALSE(std::is_sorted(d.true_labels.begin(), d.true_labels.end()));
}

TEST(Generate, DeterministicForAFixedStream) {
  ScenarioSpec s;
  s.n = 150;
  RngStream a(68, 2), b(68, 2);
  const auto da = generate_mixture(s, a);
  const auto db = generate_mixture(s, b);
  EXPECT_EQ(da.true_labels, db.true_labels);
  EXPECT_EQ(da.data.values(), db.data.values());
}
