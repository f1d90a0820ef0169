#include <gtest/gtest.h>

#include "cdpp/benchmark.hpp"
#include "cdpp/pipeline.hpp"
#include "cdpp/report.hpp"
#include "oracles.hpp"

using namespace cdpp;

namespace {

struct Blobs {
  DataMatrix data;
  std::vector<int> truth;
};

Blobs two_blobs(std::size_t n, std::uint64_t seed) {
  RngStream rng(seed, 0);
  RowMatrix x = oracle::random_points(n, 2, rng, 0.5);
  std::vector<int> truth(n, 0);
  for (std::size_t i = n / 2; i < n; ++i) {
    x(static_cast<Eigen::Index>(i), 0) += 12.0;
    truth[i] = 1;
  }
  return {DataMatrix(x), truth};
}

}  // namespace

TEST(Pipeline, TwoBlobsAreRecovered) {
  const auto b = two_blobs(100, 81);
  PipelineConfig cfg;
  for (Method m : {Method::Dpp, Method::Uniform}) {
    cfg.method = m;
    const auto rep = run_pipeline(b.data, cfg, b.truth);
    EXPECT_EQ(rep.k_hat(), 2u) << to_string(m);
    ASSERT_TRUE(rep.truth.has_value());
    EXPECT_DOUBLE_EQ(rep.truth->ari, 1.0) << to_string(m);
    EXPECT_DOUBLE_EQ(rep.truth->rn, 0.0);
  }
}

TEST(Pipeline, KMeansMethodRuns) {
  // Lloyd refinement with k up to K_max splits blobs consistently, so only the contract is checked.
  const auto b = two_blobs(100, 81);
  PipelineConfig cfg;
  cfg.method = Method::KMeans;
  cfg.consensus.runs = 50;
  const auto rep = run_pipeline(b.data, cfg, b.truth);
  EXPECT_GE(rep.k_hat(), 2u);
  EXPECT_EQ(rep.generator_sizes.size(), 50u);
  EXPECT_GT(rep.truth->ari, 0.5);
}

TEST(Pipeline, SingleRunConsensusIsBinary) {
  const auto b = two_blobs(60, 82);
  PipelineConfig cfg;
  cfg.consensus.runs = 1;
  cfg.method = Method::Uniform;
  const auto rep = run_pipeline(b.data, cfg);
  const Matrix& c = rep.consensus.entries();
  EXPECT_TRUE((c.array() == 0.0 || c.array() == 1.0).all());
  // with a binary consensus, every threshold reproduces the run's own partition (after merging)
  EXPECT_EQ(rep.selection.scores.size(), 1u);
}

TEST(Pipeline, SameSeedGivesByteIdenticalReports) {
  const auto b = two_blobs(80, 83);
  PipelineConfig cfg;
  cfg.seed = 99;
  cfg.consensus.runs = 60;
  const auto a = to_json(run_pipeline(b.data, cfg, b.truth)).dump();
  const auto c = to_json(run_pipeline(b.data, cfg, b.truth)).dump();
  EXPECT_EQ(a, c);
  cfg.seed = 100;
  EXPECT_NE(a, to_json(run_pipeline(b.data, cfg, b.truth)).dump());
}

TEST(Pipeline, WorkerCountDoesNotChangeTheResult) {
  const auto b = two_blobs(120, 84);
  PipelineConfig cfg;
  cfg.consensus.runs = 80;
  cfg.workers = 1;
  const auto one = run_pipeline(b.data, cfg);
  cfg.workers = 6;
  const auto many = run_pipeline(b.data, cfg);
  EXPECT_EQ(one.consensus.entries(), many.consensus.entries());
  EXPECT_EQ(to_json(one).dump(), to_json(many).dump());
}

TEST(Pipeline, RunsArePrefixStable) {
  const auto b = two_blobs(50, 85);
  PipelineConfig cfg;
  const KernelContext ctx(b.data, cfg.s);
  const auto ten = execute_runs(ctx, cfg, 10);
  const auto twenty = execute_runs(ctx, cfg, 20);
  for (std::size_t r = 0; r < 10; ++r) EXPECT_EQ(ten[r].partition, twenty[r].partition);
}

TEST(Pipeline, ConfigErrors) {
  const auto b = two_blobs(20, 86);
  PipelineConfig cfg;
  cfg.k_max = 1;
  EXPECT_THROW(run_pipeline(b.data, cfg), Error);
  cfg = {};
  cfg.s = -1.0;
  EXPECT_THROW(run_pipeline(b.data, cfg), Error);
  cfg = {};
  EXPECT_THROW(run_pipeline(b.data, cfg, std::vector<int>{0, 1}), Error);
  EXPECT_EQ(parse_method("pam"), Method::Uniform);
  EXPECT_THROW(parse_method("spectral"), Error);
}

TEST(Pipeline, ExceptionFromLowestIndexWins) {
  try {
    parallel_for(50, 4, [](std::size_t i) {
      if (i % 7 == 3) throw std::runtime_error(std::to_string(i));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "3");
  }
}

TEST(Benchmark, ShapeContract) {
  ScenarioSpec s;
  s.id = 0;
  s.n = 150;
  s.replicas = 3;
  BenchmarkConfig cfg;
  cfg.pipeline.consensus.runs = 40;
  cfg.checkpoints = {5, 10, 20, 40};
  const auto res = benchmark({s}, cfg);
  ASSERT_EQ(res.rows.size(), 2u);
  for (const auto& row : res.rows) {
    EXPECT_EQ(row.trajectory.size(), 4u);
    EXPECT_EQ(row.replicas_ok + row.replicas_failed, 3u);
  }
  EXPECT_EQ(res.diversity.size(), 80u);
}

TEST(Benchmark, MeanSdUsesSampleDeviation) {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const auto m = mean_sd(v);
  EXPECT_DOUBLE_EQ(m.mean, 2.5);
  EXPECT_NEAR(m.sd, std::sqrt(5.0 / 3.0), 1e-15);
}
