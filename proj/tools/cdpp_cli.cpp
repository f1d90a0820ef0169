// Command-line front end: cluster, simulate, benchmark, diagnose-diversity.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cdpp/cdpp.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOptions {
  std::string method = "dpp";
  std::size_t runs = 200;
  double tau = 0.6;
  std::vector<double> thresholds;
  double a = 0.5;
  double s = 1.0;
  std::size_t k_max = 0;
  std::uint64_t seed = 1;
  std::size_t workers = 0;
  std::string preprocess = "none";
};

void add_common(CLI::App* cmd, CommonOptions& o, bool with_method) {
  if (with_method) cmd->add_option("--method", o.method, "dpp | uniform | kmeans")->capture_default_str();
  cmd->add_option("--runs", o.runs, "Number of runs R")->capture_default_str();
  cmd->add_option("--tau", o.tau, "Minimum consensus threshold")->capture_default_str();
  cmd->add_option("--thresholds", o.thresholds, "Explicit ascending threshold grid (default: tau, tau+0.05, ...)");
  cmd->add_option("--min-size-exp", o.a, "Minimal cluster size exponent a (size ceil(n^a))")->capture_default_str();
  cmd->add_option("--s", o.s, "Bandwidth tuning factor")->capture_default_str();
  cmd->add_option("--kmax", o.k_max, "Upper bound of the baseline cluster-count draw (0: 2*ceil(sqrt(n/2)))");
  cmd->add_option("--seed", o.seed, "Master seed")->capture_default_str();
  cmd->add_option("--threads", o.workers, "Worker threads (0: all cores)");
  cmd->add_option("--preprocess", o.preprocess, "none | standardize | boxcox")->capture_default_str();
}

cdpp::PipelineConfig to_config(const CommonOptions& o) {
  cdpp::PipelineConfig cfg;
  cfg.method = cdpp::parse_method(o.method);
  cfg.consensus.runs = o.runs;
  cfg.consensus.tau = o.tau;
  cfg.consensus.thresholds = o.thresholds;
  cfg.consensus.a = o.a;
  cfg.s = o.s;
  if (o.k_max > 0) cfg.k_max = o.k_max;
  cfg.seed = o.seed;
  cfg.workers = o.workers;
  cfg.preprocessing = cdpp::parse_preprocessing(o.preprocess);
  return cfg;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) cdpp::detail::fail(cdpp::ErrorKind::Config, "cannot create directory '" + dir + "': " + ec.message());
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) cdpp::detail::fail(cdpp::ErrorKind::Config, "cannot write '" + path.string() + "'");
  return out;
}

json spec_json(const cdpp::ScenarioSpec& s) {
  json j{{"id", s.id},
         {"n", s.n},
         {"p_level", cdpp::to_string(s.p_level)},
         {"k_level", cdpp::to_string(s.k_level)},
         {"max_pairwise_overlap", s.max_pairwise_overlap},
         {"replicas", s.replicas}};
  if (s.p) j["p"] = *s.p;
  if (s.k) j["k"] = *s.k;
  return j;
}

cdpp::ScenarioSpec scenario_by_id(int id) {
  const auto grid = cdpp::scenario_grid();
  if (id < 0 || id >= static_cast<int>(grid.size()))
    cdpp::detail::fail(cdpp::ErrorKind::Config, "scenario id must lie in [0, " + std::to_string(grid.size() - 1) + "]");
  return grid[static_cast<std::size_t>(id)];
}

cdpp::ScenarioSpec parse_scenario(const json& j, int fallback_id) {
  cdpp::ScenarioSpec s;
  if (j.contains("id") && !j.contains("n")) {
    s = scenario_by_id(j.at("id").get<int>());
  } else {
    s.id = j.value("id", fallback_id);
    s.n = j.at("n").get<std::size_t>();
    s.p_level = cdpp::parse_level(j.value("p_level", std::string("low")));
    s.k_level = cdpp::parse_level(j.value("k_level", std::string("low")));
  }
  s.replicas = j.value("replicas", s.replicas);
  s.max_pairwise_overlap = j.value("max_pairwise_overlap", s.max_pairwise_overlap);
  if (j.contains("p")) s.p = j.at("p").get<std::size_t>();
  if (j.contains("k")) s.k = j.at("k").get<std::size_t>();
  cdpp::validate(s);
  return s;
}

std::vector<cdpp::ScenarioSpec> read_scenarios(const std::string& path) {
  std::ifstream in(path);
  if (!in) cdpp::detail::fail(cdpp::ErrorKind::Config, "cannot open scenario file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    cdpp::detail::fail(cdpp::ErrorKind::Config, std::string("scenario file is not valid JSON: ") + e.what());
  }
  const json& list = j.is_object() ? j.at("scenarios") : j;
  std::vector<cdpp::ScenarioSpec> out;
  for (std::size_t i = 0; i < list.size(); ++i) out.push_back(parse_scenario(list[i], 1000 + static_cast<int>(i)));
  return out;
}

// --- cluster ---------------------------------------------------------------

struct ClusterOptions {
  CommonOptions common;
  std::string input;
  std::string labels;
  bool header = false;
  std::string out;
  std::string consensus_out;
  bool timings = false;
  bool quiet = false;
  std::size_t repetitions = 1;
};

int run_cluster(const ClusterOptions& o) {
  const cdpp::csv::ReadOptions ro{o.header, 0};
  const auto data = cdpp::csv::read_matrix(o.input, ro);
  std::optional<std::vector<int>> truth;
  if (!o.labels.empty()) truth = cdpp::csv::read_labels(o.labels, ro);
  auto cfg = to_config(o.common);
  cfg.repetitions = o.repetitions;
  const auto reports = cdpp::run_repetitions(data, cfg, truth);
  const auto& report = reports.front();

  if (reports.size() == 1) {
    if (!o.quiet) cdpp::print_summary(std::cout, report);
    if (!o.out.empty()) open_out(o.out) << cdpp::to_json(report, o.timings).dump(2) << '\n';
  } else {
    json all = json::array();
    std::vector<double> aris;
    for (std::size_t r = 0; r < reports.size(); ++r) {
      all.push_back(cdpp::to_json(reports[r], o.timings));
      if (reports[r].truth) aris.push_back(reports[r].truth->ari);
      if (!o.quiet) {
        std::cout << "repetition " << r << "  seed=" << reports[r].seed << "  K_hat=" << reports[r].k_hat();
        if (reports[r].truth) std::cout << "  ARI=" << std::fixed << std::setprecision(4) << reports[r].truth->ari;
        std::cout << '\n';
      }
    }
    json summary{{"repetitions", reports.size()}};
    if (!aris.empty()) {
      const auto m = cdpp::mean_sd(aris);
      summary["ari_mean"] = m.mean;
      summary["ari_sd"] = m.sd;
      if (!o.quiet) std::cout << "mean ARI=" << std::fixed << std::setprecision(4) << m.mean << "  sd=" << m.sd << '\n';
    }
    if (!o.out.empty()) open_out(o.out) << json{{"summary", summary}, {"reports", all}}.dump(2) << '\n';
  }
  if (!o.consensus_out.empty()) {
    auto out = open_out(o.consensus_out);
    cdpp::csv::write_consensus(out, report.consensus);
  }
  return 0;
}

// --- simulate --------------------------------------------------------------

struct SimulateOptions {
  std::vector<int> ids;
  bool grid = false;
  std::size_t replicas = 10;
  double overlap = 0.01;
  std::uint64_t seed = 1;
  std::string out = "simulated";
};

int run_simulate(const SimulateOptions& o) {
  std::vector<cdpp::ScenarioSpec> specs;
  if (o.grid) specs = cdpp::scenario_grid();
  for (int id : o.ids) specs.push_back(scenario_by_id(id));
  if (specs.empty()) cdpp::detail::fail(cdpp::ErrorKind::Config, "pass --scenario-id or --grid");
  ensure_dir(o.out);
  int failures = 0;
  for (auto spec : specs) {
    spec.replicas = o.replicas;
    spec.max_pairwise_overlap = o.overlap;
    for (std::size_t rep = 0; rep < spec.replicas; ++rep) {
      std::ostringstream stem;
      stem << "scenario_" << std::setw(2) << std::setfill('0') << spec.id << "_rep_" << std::setw(2) << rep;
      try {
        auto rng = cdpp::replica_stream(o.seed, spec.id, rep);
        const auto ds = cdpp::generate_mixture(spec, rng);
        auto data_out = open_out(fs::path(o.out) / (stem.str() + "_data.csv"));
        cdpp::csv::write_matrix(data_out, ds.data.values());
        auto label_out = open_out(fs::path(o.out) / (stem.str() + "_labels.csv"));
        cdpp::csv::write_labels(label_out, ds.true_labels);
        json side{{"scenario", spec_json(spec)},
                  {"seed", o.seed},
                  {"replica", rep},
                  {"p", ds.data.p()},
                  {"k", ds.model.k()},
                  {"weights", ds.model.weights},
                  {"counts", ds.counts},
                  {"max_overlap_estimate", ds.max_overlap},
                  {"shrink_steps", ds.shrink_steps},
                  {"model_draws", ds.model_draws}};
        open_out(fs::path(o.out) / (stem.str() + ".json")) << side.dump(2) << '\n';
        std::cout << stem.str() << ": n=" << ds.data.n() << " p=" << ds.data.p() << " K=" << ds.model.k()
                  << " max overlap=" << ds.max_overlap << '\n';
      } catch (const cdpp::Error& e) {
        ++failures;
        std::cerr << stem.str() << ": " << e.what() << '\n';
      }
    }
  }
  return failures == 0 ? 0 : cdpp::exit_code(cdpp::ErrorKind::GenerationExhausted);
}

// --- benchmark -------------------------------------------------------------

struct BenchmarkOptions {
  CommonOptions common;
  std::string scenarios;
  std::vector<int> ids;
  bool grid = false;
  std::size_t replicas = 0;
  std::vector<std::string> methods{"dpp", "uniform"};
  std::vector<std::size_t> checkpoints{10, 50, 100, 200};
  std::string out = "benchmark";
};

int run_benchmark(const BenchmarkOptions& o) {
  std::vector<cdpp::ScenarioSpec> specs;
  if (!o.scenarios.empty()) specs = read_scenarios(o.scenarios);
  if (o.grid) {
    const auto g = cdpp::scenario_grid();
    specs.insert(specs.end(), g.begin(), g.end());
  }
  for (int id : o.ids) specs.push_back(scenario_by_id(id));
  if (specs.empty()) cdpp::detail::fail(cdpp::ErrorKind::Config, "pass --scenarios, --scenario-id or --grid");
  if (o.replicas > 0)
    for (auto& s : specs) s.replicas = o.replicas;

  cdpp::BenchmarkConfig cfg;
  cfg.pipeline = to_config(o.common);
  cfg.methods.clear();
  for (const auto& m : o.methods) cfg.methods.push_back(cdpp::parse_method(m));
  cfg.checkpoints = o.checkpoints;
  const auto result = cdpp::benchmark(specs, cfg);

  ensure_dir(o.out);
  auto summary = open_out(fs::path(o.out) / "summary.csv");
  summary << "scenario_id,n,p_level,k_level,method,replicas_ok,replicas_failed,ari_mean,ari_sd,abs_rn_mean,abs_rn_sd\n";
  auto traj = open_out(fs::path(o.out) / "trajectories.csv");
  traj << "scenario_id,method,runs,ari_mean,ari_sd,replicas\n";
  std::cout << std::setw(5) << "id" << std::setw(6) << "n" << std::setw(8) << "p" << std::setw(8) << "K"
            << std::setw(9) << "method" << std::setw(6) << "ok" << std::setw(16) << "ARI" << std::setw(16) << "|RN|"
            << '\n';
  for (const auto& r : result.rows) {
    summary << r.scenario_id << ',' << r.n << ',' << cdpp::to_string(r.p_level) << ',' << cdpp::to_string(r.k_level)
            << ',' << cdpp::to_string(r.method) << ',' << r.replicas_ok << ',' << r.replicas_failed << ','
            << r.ari.mean << ',' << r.ari.sd << ',' << r.abs_rn.mean << ',' << r.abs_rn.sd << '\n';
    for (const auto& t : r.trajectory)
      traj << r.scenario_id << ',' << cdpp::to_string(r.method) << ',' << t.runs << ',' << t.ari.mean << ','
           << t.ari.sd << ',' << t.ari.count << '\n';
    std::ostringstream ari, arn;
    ari << std::fixed << std::setprecision(2) << r.ari.mean << " (" << r.ari.sd << ")";
    arn << std::fixed << std::setprecision(2) << r.abs_rn.mean << " (" << r.abs_rn.sd << ")";
    std::cout << std::setw(5) << r.scenario_id << std::setw(6) << r.n << std::setw(8) << cdpp::to_string(r.p_level)
              << std::setw(8) << cdpp::to_string(r.k_level) << std::setw(9) << cdpp::to_string(r.method)
              << std::setw(6) << r.replicas_ok << std::setw(16) << ari.str() << std::setw(16) << arn.str() << '\n';
  }
  auto div = open_out(fs::path(o.out) / "diversity.csv");
  div << "scenario_id,method,draw,size,log_likelihood\n" << std::setprecision(17);
  for (const auto& d : result.diversity)
    div << d.scenario_id << ',' << cdpp::to_string(d.method) << ',' << d.draw << ',' << d.size << ','
        << d.log_likelihood << '\n';
  auto fail = open_out(fs::path(o.out) / "failures.csv");
  fail << "scenario_id,replica,method,error\n";
  for (const auto& f : result.failures) {
    std::string msg = f.error;
    for (char& c : msg)
      if (c == ',' || c == '\n') c = ';';
    fail << f.scenario_id << ',' << f.replica << ',' << f.method << ',' << msg << '\n';
  }
  if (!result.failures.empty()) std::cerr << result.failures.size() << " replica failure(s), see failures.csv\n";
  return 0;
}

// --- diagnose-diversity ----------------------------------------------------

struct DiversityOptions {
  CommonOptions common;
  std::string input;
  bool header = false;
  std::size_t draws = 200;
  std::string out = "diversity.csv";
  std::size_t bins = 0;
  std::string histogram_out;
};

int run_diversity(const DiversityOptions& o) {
  const auto data = cdpp::csv::read_matrix(o.input, {o.header, 0});
  const auto cfg = to_config(o.common);
  const cdpp::KernelContext ctx(cdpp::preprocess(data, cfg.preprocessing), cfg.s);
  const std::size_t k_max = cdpp::effective_k_max(cfg, ctx.n());
  std::vector<std::vector<cdpp::DiversitySample>> series;
  for (auto m : {cdpp::Method::Dpp, cdpp::Method::Uniform})
    series.push_back(cdpp::diversity_samples(ctx, m, o.draws, cfg.seed, k_max, cfg.dpp));

  auto out = open_out(o.out);
  out << "method,draw,size,log_likelihood\n" << std::setprecision(17);
  for (const auto& s : series)
    for (const auto& d : s) out << cdpp::to_string(d.method) << ',' << d.draw << ',' << d.size << ',' << d.log_likelihood << '\n';

  for (const auto& s : series) {
    std::vector<double> v;
    for (const auto& d : s)
      if (std::isfinite(d.log_likelihood)) v.push_back(d.log_likelihood);
    const auto ms = cdpp::mean_sd(v);
    std::cout << std::setw(8) << cdpp::to_string(s.front().method) << "  mean loglik " << std::setw(12) << ms.mean
              << "  sd " << std::setw(10) << ms.sd << "  finite " << v.size() << '/' << s.size() << '\n';
  }

  if (o.bins > 0 && !o.histogram_out.empty()) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& s : series)
      for (const auto& d : s)
        if (std::isfinite(d.log_likelihood)) {
          lo = std::min(lo, d.log_likelihood);
          hi = std::max(hi, d.log_likelihood);
        }
    if (!(hi > lo)) hi = lo + 1.0;
    const double width = (hi - lo) / static_cast<double>(o.bins);
    auto hist = open_out(o.histogram_out);
    hist << "method,bin_lo,bin_hi,count\n" << std::setprecision(10);
    for (const auto& s : series) {
      std::vector<std::size_t> counts(o.bins, 0);
      for (const auto& d : s) {
        if (!std::isfinite(d.log_likelihood)) continue;
        auto b = static_cast<std::size_t>((d.log_likelihood - lo) / width);
        ++counts[std::min(b, o.bins - 1)];
      }
      for (std::size_t b = 0; b < o.bins; ++b)
        hist << cdpp::to_string(s.front().method) << ',' << lo + width * static_cast<double>(b) << ','
             << lo + width * static_cast<double>(b + 1) << ',' << counts[b] << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Consensus clustering with DPP-sampled Voronoi partitions"};
  app.require_subcommand(1);

  ClusterOptions cluster;
  auto* c = app.add_subcommand("cluster", "Cluster a CSV dataset");
  c->add_option("input", cluster.input, "Feature CSV (rows = observations)")->required();
  c->add_option("--labels", cluster.labels, "Ground-truth label CSV for ARI / RN");
  c->add_flag("--header", cluster.header, "Input files start with a header row");
  c->add_option("--out", cluster.out, "JSON report path");
  c->add_option("--consensus-out", cluster.consensus_out, "Write the consensus matrix as CSV");
  c->add_flag("--timings", cluster.timings, "Include wall-clock timings in the JSON report");
  c->add_flag("--quiet", cluster.quiet, "Do not print the text summary");
  c->add_option("--repetitions", cluster.repetitions, "Independent executions with seeds seed, seed+1, ...")
      ->capture_default_str();
  add_common(c, cluster.common, true);

  SimulateOptions sim;
  auto* s = app.add_subcommand("simulate", "Generate Gaussian-mixture benchmark datasets");
  s->add_option("--scenario-id", sim.ids, "Scenario id(s) in [0, 23]");
  s->add_flag("--grid", sim.grid, "All 24 scenarios");
  s->add_option("--replicas", sim.replicas, "Datasets per scenario")->capture_default_str();
  s->add_option("--max-overlap", sim.overlap, "Maximum pairwise overlap")->capture_default_str();
  s->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
  s->add_option("--out", sim.out, "Output directory")->capture_default_str();

  BenchmarkOptions bench;
  auto* b = app.add_subcommand("benchmark", "Simulation study comparing sampling methods");
  b->add_option("--scenarios", bench.scenarios, "JSON scenario list");
  b->add_option("--scenario-id", bench.ids, "Scenario id(s) in [0, 23]");
  b->add_flag("--grid", bench.grid, "All 24 scenarios");
  b->add_option("--replicas", bench.replicas, "Override replicas per scenario");
  b->add_option("--methods", bench.methods, "Methods to compare")->delimiter(',')->capture_default_str();
  b->add_option("--checkpoints", bench.checkpoints, "Prefix run counts for ARI trajectories")->delimiter(',');
  b->add_option("--out", bench.out, "Output directory")->capture_default_str();
  add_common(b, bench.common, false);

  DiversityOptions div;
  auto* d = app.add_subcommand("diagnose-diversity", "Log-likelihood of DPP vs uniform generator sets");
  d->add_option("input", div.input, "Feature CSV")->required();
  d->add_flag("--header", div.header, "Input file starts with a header row");
  d->add_option("--draws", div.draws, "Draws per sampler")->capture_default_str();
  d->add_option("--out", div.out, "Per-draw CSV")->capture_default_str();
  d->add_option("--bins", div.bins, "Histogram bins (with --histogram-out)");
  d->add_option("--histogram-out", div.histogram_out, "Binned histogram CSV");
  add_common(d, div.common, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*c) return run_cluster(cluster);
    if (*s) return run_simulate(sim);
    if (*b) return run_benchmark(bench);
    if (*d) return run_diversity(div);
  } catch (const cdpp::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cdpp::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
