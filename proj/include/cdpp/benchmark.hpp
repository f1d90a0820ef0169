#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cdpp/consensus.hpp"
#include "cdpp/error.hpp"
#include "cdpp/metrics.hpp"
#include "cdpp/pipeline.hpp"
#include "cdpp/simgen.hpp"

namespace cdpp {

struct BenchmarkConfig {
  PipelineConfig pipeline;  // method is overridden per entry of `methods`
  std::vector<Method> methods{Method::Dpp, Method::Uniform};
  std::vector<std::size_t> checkpoints{10, 50, 100, 200};
  GenerationOptions generation;
};

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation; 0 for fewer than two values
  std::size_t count = 0;
};

inline MeanSd mean_sd(std::span<const double> v) {
  MeanSd m;
  m.count = v.size();
  if (v.empty()) return m;
  double s = 0.0;
  for (double x : v) s += x;
  m.mean = s / static_cast<double>(v.size());
  if (v.size() > 1) {
    double q = 0.0;
    for (double x : v) q += (x - m.mean) * (x - m.mean);
    m.sd = std::sqrt(q / static_cast<double>(v.size() - 1));
  }
  return m;
}

struct TrajectoryPoint {
  std::size_t runs = 0;
  MeanSd ari;
};

struct BenchmarkRow {
  int scenario_id = -1;
  std::size_t n = 0;
  Level p_level = Level::Low;
  Level k_level = Level::Low;
  Method method = Method::Dpp;
  std::size_t replicas_ok = 0;
  std::size_t replicas_failed = 0;
  MeanSd ari;
  MeanSd abs_rn;
  std::vector<TrajectoryPoint> trajectory;
};

struct BenchmarkFailure {
  int scenario_id = -1;
  std::size_t replica = 0;
  std::string method;  // empty: dataset generation failed
  std::string error;
};

struct DiversitySample {
  int scenario_id = -1;
  Method method = Method::Dpp;
  std::size_t draw = 0;
  std::size_t size = 0;
  double log_likelihood = 0.0;
};

struct BenchmarkResult {
  std::vector<BenchmarkRow> rows;
  std::vector<BenchmarkFailure> failures;
  std::vector<DiversitySample> diversity;
};

// Scores of one replica at each checkpoint and at the configured run count.
struct ReplicaScores {
  std::vector<double> checkpoint_ari;
  double ari = 0.0;
  double abs_rn = 0.0;
};

namespace detail {

// Selected clustering from a consensus matrix; when no threshold yields more
// than one cluster the method's answer is the single all-in-one cluster.
inline Partition consolidated_or_single(const KernelContext& ctx, const ConsensusMatrix& c, const ConsensusConfig& cfg) {
  try {
    return consolidate(ctx, c, cfg).selection.chosen.partition;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoCandidates) throw;
    return Partition::from_labels(std::vector<int>(ctx.n(), 0));
  }
}

}  // namespace detail

/// Consensus clustering of one dataset, scored against truth after the first
/// r runs for every checkpoint r (prefix consensus) and after cfg.consensus.runs.
inline ReplicaScores score_replica(const KernelContext& ctx, const PipelineConfig& cfg, const std::vector<int>& truth,
                                   std::span<const std::size_t> checkpoints, std::vector<RunRecord>* records_out = nullptr) {
  std::size_t total = cfg.consensus.runs;
  for (auto c : checkpoints) total = std::max(total, c);
  auto records = execute_runs(ctx, cfg, total);

  std::vector<std::size_t> marks(checkpoints.begin(), checkpoints.end());
  marks.push_back(cfg.consensus.runs);
  std::vector<std::size_t> order = marks;
  std::sort(order.begin(), order.end());
  order.erase(std::unique(order.begin(), order.end()), order.end());

  ReplicaScores out;
  std::vector<std::pair<std::size_t, TruthScores>> at;
  ConsensusCounts counts(ctx.n());
  std::size_t done = 0;
  for (std::size_t mark : order) {
    for (; done < mark; ++done) counts.add(records[done].partition);
    const Partition chosen = detail::consolidated_or_single(ctx, ConsensusMatrix(counts), cfg.consensus);
    at.emplace_back(mark, score_against(chosen, truth));
  }
  auto lookup = [&](std::size_t mark) {
    for (const auto& [m, s] : at)
      if (m == mark) return s;
    return TruthScores{};
  };
  for (auto c : checkpoints) out.checkpoint_ari.push_back(lookup(c).ari);
  const auto final_scores = lookup(cfg.consensus.runs);
  out.ari = final_scores.ari;
  out.abs_rn = final_scores.abs_rn;
  if (records_out) *records_out = std::move(records);
  return out;
}

/// Log-likelihood under DPP(L) of `draws` generator sets from one sampler
/// (DPP or the uniform baseline); draw d uses stream (seed, d).
inline std::vector<DiversitySample> diversity_samples(const KernelContext& ctx, Method method, std::size_t draws,
                                                      std::uint64_t seed, std::size_t k_max, const DppOptions& dpp = {}) {
  if (method == Method::KMeans) detail::fail(ErrorKind::Config, "diversity diagnostics compare dpp and uniform sampling");
  std::vector<DiversitySample> out(draws);
  for (std::size_t d = 0; d < draws; ++d) {
    RngStream rng(seed, d);
    const GeneratorSet g = method == Method::Dpp ? sample_dpp(ctx.spectrum, rng, dpp)
                                                 : sample_uniform(ctx.n(), BaselineConfig{k_max}, rng);
    out[d] = {-1, method, d, g.size(), dpp_log_likelihood(ctx.kernel, g, ctx.log_det_l_plus_i)};
  }
  return out;
}

// Stream of the r-th replica dataset of a scenario.
inline RngStream replica_stream(std::uint64_t seed, int scenario_id, std::size_t replica) {
  return RngStream(seed ^ 0x5ca1ab1e0ddba11ULL, static_cast<std::uint64_t>(scenario_id + 1) * 1000003ULL + replica);
}

/// Simulation study: every scenario x replica dataset is clustered by every
/// method; ARI / |RN| summaries, prefix-consensus ARI trajectories, and the
/// per-draw DPP log-likelihoods of the first replica's runs for each method.
/// Failures are recorded per replica and never abort the study.
inline BenchmarkResult benchmark(const std::vector<ScenarioSpec>& scenarios, const BenchmarkConfig& cfg) {
  BenchmarkResult out;
  for (const auto& spec : scenarios) {
    std::vector<BenchmarkRow> rows;
    std::vector<std::vector<std::vector<double>>> traj(cfg.methods.size(),
                                                       std::vector<std::vector<double>>(cfg.checkpoints.size()));
    std::vector<std::vector<double>> aris(cfg.methods.size());
    std::vector<std::vector<double>> rns(cfg.methods.size());
    for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
      BenchmarkRow row;
      row.scenario_id = spec.id;
      row.n = spec.n;
      row.p_level = spec.p_level;
      row.k_level = spec.k_level;
      row.method = cfg.methods[m];
      rows.push_back(row);
    }

    for (std::size_t rep = 0; rep < spec.replicas; ++rep) {
      std::optional<LabeledDataset> ds;
      std::optional<KernelContext> ctx;
      try {
        auto rng = replica_stream(cfg.pipeline.seed, spec.id, rep);
        ds.emplace(generate_mixture(spec, rng, cfg.generation));
        ctx.emplace(preprocess(ds->data, cfg.pipeline.preprocessing), cfg.pipeline.s);
      } catch (const Error& e) {
        out.failures.push_back({spec.id, rep, "", e.what()});
        for (auto& r : rows) ++r.replicas_failed;
        continue;
      }
      for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
        PipelineConfig pc = cfg.pipeline;
        pc.method = cfg.methods[m];
        pc.seed = cfg.pipeline.seed + 7919ULL * (rep + 1);
        try {
          std::vector<RunRecord> records;
          const auto s = score_replica(*ctx, pc, ds->true_labels, cfg.checkpoints, rep == 0 ? &records : nullptr);
          for (std::size_t c = 0; c < cfg.checkpoints.size(); ++c) traj[m][c].push_back(s.checkpoint_ari[c]);
          aris[m].push_back(s.ari);
          rns[m].push_back(s.abs_rn);
          ++rows[m].replicas_ok;
          const std::size_t keep = std::min(records.size(), cfg.pipeline.consensus.runs);
          for (std::size_t d = 0; d < keep; ++d)
            out.diversity.push_back({spec.id, pc.method, d, records[d].generators, records[d].log_likelihood});
        } catch (const Error& e) {
          out.failures.push_back({spec.id, rep, to_string(pc.method), e.what()});
          ++rows[m].replicas_failed;
        }
      }
    }

    for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
      rows[m].ari = mean_sd(aris[m]);
      rows[m].abs_rn = mean_sd(rns[m]);
      for (std::size_t c = 0; c < cfg.checkpoints.size(); ++c)
        rows[m].trajectory.push_back({cfg.checkpoints[c], mean_sd(traj[m][c])});
      out.rows.push_back(std::move(rows[m]));
    }
  }
  return out;
}

}  // namespace cdpp
