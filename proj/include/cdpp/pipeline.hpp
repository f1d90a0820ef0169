#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cdpp/consensus.hpp"
#include "cdpp/data.hpp"
#include "cdpp/error.hpp"
#include "cdpp/kernel.hpp"
#include "cdpp/metrics.hpp"
#include "cdpp/parallel.hpp"
#include "cdpp/partition.hpp"
#include "cdpp/preprocess.hpp"
#include "cdpp/rng.hpp"
#include "cdpp/sampling.hpp"
#include "cdpp/validation.hpp"

namespace cdpp {

enum class Method { Dpp, Uniform, KMeans };

inline const char* to_string(Method m) noexcept {
  switch (m) {
    case Method::Dpp: return "dpp";
    case Method::Uniform: return "uniform";
    case Method::KMeans: return "kmeans";
  }
  return "unknown";
}

inline Method parse_method(const std::string& s) {
  if (s == "dpp") return Method::Dpp;
  if (s == "uniform" || s == "pam") return Method::Uniform;
  if (s == "kmeans") return Method::KMeans;
  detail::fail(ErrorKind::Config, "unknown method '" + s + "' (expected dpp, uniform or kmeans)");
}

struct PipelineConfig {
  Method method = Method::Dpp;
  ConsensusConfig consensus;
  double s = 1.0;
  std::optional<std::size_t> k_max;  // default_k_max(n) when unset
  std::uint64_t seed = 1;
  std::size_t repetitions = 10;  // independent pipeline executions in run_repetitions()
  Preprocessing preprocessing = Preprocessing::None;
  std::size_t workers = 0;  // 0: hardware concurrency
  DppOptions dpp;
  LloydOptions lloyd;
};

inline void validate(const PipelineConfig& cfg, std::size_t n) {
  validate(cfg.consensus);
  if (!(cfg.s > 0.0) || !std::isfinite(cfg.s)) detail::fail(ErrorKind::Config, "bandwidth factor s must be positive");
  if (cfg.k_max && (*cfg.k_max < 2 || *cfg.k_max > n)) detail::fail(ErrorKind::Config, "kmax must lie in [2, n]");
  if (cfg.repetitions < 1) detail::fail(ErrorKind::Config, "repetitions must be at least 1");
}

// Everything derived once from the data and shared read-only by all runs.
struct KernelContext {
  DataMatrix data;
  SquaredDistances d2;
  double sigma2_hat = 0.0;
  double s = 1.0;
  KernelMatrix kernel;
  SpectralDecomposition spectrum;
  double log_det_l_plus_i = 0.0;

  KernelContext(DataMatrix x, double s_factor)
      : data(std::move(x)), d2(data), sigma2_hat(estimate_bandwidth(d2)), s(s_factor),
        kernel(build_rbf_kernel(d2, BandwidthConfig{sigma2_hat, s_factor})), spectrum(eigendecompose(kernel)),
        log_det_l_plus_i(spectrum.log_det_l_plus_i()) {}

  std::size_t n() const noexcept { return data.n(); }
};

// Output of one run: its generator set and the resulting partition.
struct RunRecord {
  Partition partition;
  std::size_t generators = 0;
  double log_likelihood = 0.0;  // of the generator set under DPP(L)
};

inline std::size_t effective_k_max(const PipelineConfig& cfg, std::size_t n) {
  return cfg.k_max ? *cfg.k_max : default_k_max(n);
}

/// One partition from run `run`, driven by the stream (seed, run).
inline RunRecord execute_run(const KernelContext& ctx, const PipelineConfig& cfg, std::size_t run) {
  RngStream rng(cfg.seed, run);
  const std::size_t n = ctx.n();
  GeneratorSet gens;
  RunRecord rec;
  switch (cfg.method) {
    case Method::Dpp:
      gens = sample_dpp(ctx.spectrum, rng, cfg.dpp);
      rec.partition = voronoi_assign(ctx.d2, gens);
      break;
    case Method::Uniform:
      gens = sample_uniform(n, BaselineConfig{effective_k_max(cfg, n)}, rng);
      rec.partition = voronoi_assign(ctx.d2, gens);
      break;
    case Method::KMeans: {
      const auto k = static_cast<std::size_t>(rng.uniform_int(2, effective_k_max(cfg, n)));
      gens = kmeanspp_init(ctx.d2, k, rng);
      rec.partition = lloyd_kmeans(ctx.data, gather_rows(ctx.data, gens), cfg.lloyd).partition;
      break;
    }
  }
  rec.generators = gens.size();
  rec.log_likelihood = dpp_log_likelihood(ctx.kernel, gens, ctx.log_det_l_plus_i);
  return rec;
}

/// Runs [0, count) in parallel; record r always comes from stream r.
inline std::vector<RunRecord> execute_runs(const KernelContext& ctx, const PipelineConfig& cfg, std::size_t count) {
  std::vector<RunRecord> out(count);
  parallel_for(count, cfg.workers, [&](std::size_t r) { out[r] = execute_run(ctx, cfg, r); });
  return out;
}

/// Consensus over the first `count` records, with per-worker partial counts
/// merged by integer addition.
inline ConsensusMatrix accumulate_runs(std::span<const RunRecord> records, std::size_t n, std::size_t workers) {
  const std::size_t count = records.size();
  const std::size_t chunks = std::min(resolve_workers(workers), std::max<std::size_t>(1, count / 16));
  std::vector<ConsensusCounts> partial(chunks, ConsensusCounts(n));
  parallel_for(chunks, chunks, [&](std::size_t c) {
    for (std::size_t r = c * count / chunks; r < (c + 1) * count / chunks; ++r) partial[c].add(records[r].partition);
  });
  for (std::size_t c = 1; c < chunks; ++c) partial[0].merge(partial[c]);
  return ConsensusMatrix(partial[0]);
}

struct Consolidation {
  CandidateSet candidates;
  SelectionResult selection;
};

inline Consolidation consolidate(const KernelContext& ctx, const ConsensusMatrix& c, const ConsensusConfig& cfg) {
  Consolidation out;
  out.candidates = candidate_clusterings(c, cfg);
  out.selection = select_clustering(ctx.kernel, out.candidates.candidates);
  return out;
}

struct TruthScores {
  std::size_t g_true = 0;
  double ari = 0.0;
  double rn = 0.0;
  double abs_rn = 0.0;
};

inline TruthScores score_against(const Partition& estimate, const std::vector<int>& truth) {
  const Partition t = Partition::from_labels(truth);
  TruthScores s;
  s.g_true = t.k();
  s.ari = ari(estimate.labels(), t.labels());
  s.rn = rn(estimate.k(), t.k());
  s.abs_rn = std::abs(s.rn);
  return s;
}

struct Timings {
  double kernel_seconds = 0.0;
  double runs_seconds = 0.0;
  double consensus_seconds = 0.0;
  double selection_seconds = 0.0;
};

struct RunReport {
  Method method = Method::Dpp;
  std::size_t n = 0;
  std::size_t p = 0;
  std::size_t runs = 0;
  double sigma2_hat = 0.0;
  double s = 1.0;
  std::size_t k_max = 0;
  std::size_t min_cluster_size = 0;
  double expected_dpp_size = 0.0;
  std::uint64_t seed = 0;
  Preprocessing preprocessing = Preprocessing::None;
  std::vector<ThresholdSummary> thresholds;
  SelectionResult selection;
  std::optional<TruthScores> truth;
  std::vector<double> log_likelihoods;
  std::vector<std::size_t> generator_sizes;
  Timings timings;
  ConsensusMatrix consensus;

  const Clustering& chosen() const noexcept { return selection.chosen; }
  std::size_t k_hat() const noexcept { return selection.chosen.k(); }
};

/// Full consensus clustering: kernel and spectrum once, R independent runs,
/// consensus, candidate extraction and KVI selection, plus ARI / RN when
/// ground truth is supplied.
inline RunReport run_pipeline(const DataMatrix& raw, const PipelineConfig& cfg,
                              const std::optional<std::vector<int>>& truth = std::nullopt) {
  using clock = std::chrono::steady_clock;
  auto seconds = [](clock::time_point a, clock::time_point b) { return std::chrono::duration<double>(b - a).count(); };
  validate(cfg, raw.n());
  if (truth && truth->size() != raw.n()) detail::fail(ErrorKind::ShapeMismatch, "label count does not match data rows");

  const auto t0 = clock::now();
  const KernelContext ctx(preprocess(raw, cfg.preprocessing), cfg.s);
  const auto t1 = clock::now();
  const auto records = execute_runs(ctx, cfg, cfg.consensus.runs);
  const auto t2 = clock::now();
  ConsensusMatrix c = accumulate_runs(records, ctx.n(), cfg.workers);
  const auto t3 = clock::now();

  RunReport rep;
  rep.method = cfg.method;
  rep.n = ctx.n();
  rep.p = ctx.data.p();
  rep.runs = cfg.consensus.runs;
  rep.sigma2_hat = ctx.sigma2_hat;
  rep.s = cfg.s;
  rep.k_max = effective_k_max(cfg, ctx.n());
  rep.min_cluster_size = min_cluster_size(ctx.n(), cfg.consensus.a);
  rep.expected_dpp_size = ctx.spectrum.expected_dpp_size();
  rep.seed = cfg.seed;
  rep.preprocessing = cfg.preprocessing;
  for (const auto& r : records) {
    rep.log_likelihoods.push_back(r.log_likelihood);
    rep.generator_sizes.push_back(r.generators);
  }

  auto result = consolidate(ctx, c, cfg.consensus);
  const auto t4 = clock::now();
  rep.thresholds = std::move(result.candidates.table);
  rep.selection = std::move(result.selection);
  if (truth) rep.truth = score_against(rep.selection.chosen.partition, *truth);
  rep.timings = {seconds(t0, t1), seconds(t1, t2), seconds(t2, t3), seconds(t3, t4)};
  rep.consensus = std::move(c);
  return rep;
}

/// The real-data protocol: cfg.repetitions complete pipeline executions with
/// seeds cfg.seed, cfg.seed + 1, ...
inline std::vector<RunReport> run_repetitions(const DataMatrix& raw, const PipelineConfig& cfg,
                                              const std::optional<std::vector<int>>& truth = std::nullopt) {
  validate(cfg, raw.n());
  std::vector<RunReport> out;
  out.reserve(cfg.repetitions);
  for (std::size_t r = 0; r < cfg.repetitions; ++r) {
    PipelineConfig one = cfg;
    one.seed = cfg.seed + r;
    out.push_back(run_pipeline(raw, one, truth));
  }
  return out;
}

}  // namespace cdpp
