#pragma once

#include <cmath>
#include <cstddef>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "cdpp/pipeline.hpp"

namespace cdpp {

namespace detail {

// JSON has no infinities; non-finite values become null.
inline nlohmann::json number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace detail

/// Machine-readable report. Timings are wall-clock and therefore omitted
/// unless asked for, keeping reports byte-identical across reruns.
inline nlohmann::json to_json(const RunReport& r, bool include_timings = false) {
  using nlohmann::json;
  json j;
  j["method"] = to_string(r.method);
  j["n"] = r.n;
  j["p"] = r.p;
  j["runs"] = r.runs;
  j["seed"] = r.seed;
  j["preprocessing"] = to_string(r.preprocessing);
  j["kernel"] = {{"sigma2_hat", r.sigma2_hat}, {"s", r.s}, {"expected_dpp_size", r.expected_dpp_size}};
  j["k_max"] = r.k_max;
  j["min_cluster_size"] = r.min_cluster_size;

  json table = json::array();
  for (const auto& t : r.thresholds) {
    table.push_back({{"threshold", t.threshold},
                     {"components", t.components},
                     {"clusters", t.clusters},
                     {"merged", t.merged},
                     {"kept", t.kept}});
  }
  j["thresholds"] = std::move(table);

  json cands = json::array();
  for (const auto& s : r.selection.scores) {
    json c{{"k", s.k},           {"threshold", s.threshold}, {"merged", s.merged},
           {"w_v", detail::number(s.w_v)}, {"b_v", detail::number(s.b_v)}, {"sr", detail::number(s.sr)},
           {"b_tilde", detail::number(s.b_tilde)}, {"kvi", detail::number(s.kvi)}, {"excluded", s.excluded}};
    if (!s.reason.empty()) c["reason"] = s.reason;
    cands.push_back(std::move(c));
  }
  j["candidates"] = std::move(cands);
  j["alpha"] = detail::number(r.selection.alpha);

  const auto& chosen = r.selection.chosen;
  j["chosen"] = {{"k", chosen.k()},
                 {"threshold", chosen.threshold},
                 {"merged", chosen.merged},
                 {"candidate_index", r.selection.chosen_index},
                 {"sizes", chosen.partition.sizes()},
                 {"labels", chosen.labels()}};
  if (r.truth) {
    j["truth"] = {{"g_true", r.truth->g_true}, {"ari", r.truth->ari}, {"rn", r.truth->rn}, {"abs_rn", r.truth->abs_rn}};
  }
  json ll = json::array();
  for (double v : r.log_likelihoods) ll.push_back(detail::number(v));
  j["runs_detail"] = {{"log_likelihood", std::move(ll)}, {"generators", r.generator_sizes}};
  if (include_timings) {
    j["timings"] = {{"kernel_seconds", r.timings.kernel_seconds},
                    {"runs_seconds", r.timings.runs_seconds},
                    {"consensus_seconds", r.timings.consensus_seconds},
                    {"selection_seconds", r.timings.selection_seconds}};
  }
  return j;
}

// Aligned plain-text summary for terminals.
inline void print_summary(std::ostream& out, const RunReport& r) {
  std::ostringstream s;
  s << std::fixed;
  s << "method " << to_string(r.method) << "  n=" << r.n << "  p=" << r.p << "  runs=" << r.runs
    << "  sigma2_hat=" << std::setprecision(6) << r.sigma2_hat << "  E|Y|=" << std::setprecision(2)
    << r.expected_dpp_size << "  min size=" << r.min_cluster_size << '\n';
  s << std::setw(10) << "threshold" << std::setw(12) << "components" << std::setw(10) << "clusters" << std::setw(8)
    << "merged" << std::setw(8) << "kept" << '\n';
  for (const auto& t : r.thresholds) {
    s << std::setw(10) << std::setprecision(2) << t.threshold << std::setw(12) << t.components << std::setw(10)
      << t.clusters << std::setw(8) << (t.merged ? "yes" : "no") << std::setw(8) << (t.kept ? "yes" : "no") << '\n';
  }
  s << '\n'
    << std::setw(4) << "K" << std::setw(10) << "threshold" << std::setw(12) << "W_V" << std::setw(12) << "B_V"
    << std::setw(10) << "SR" << std::setw(14) << "KVI" << '\n';
  for (std::size_t i = 0; i < r.selection.scores.size(); ++i) {
    const auto& c = r.selection.scores[i];
    s << std::setw(4) << c.k << std::setw(10) << std::setprecision(2) << c.threshold << std::setw(12)
      << std::setprecision(5) << c.w_v << std::setw(12) << c.b_v << std::setw(10) << std::setprecision(4) << c.sr;
    if (c.excluded) {
      s << std::setw(14) << "excluded";
    } else {
      s << std::setw(14) << std::setprecision(4) << c.kvi;
    }
    s << (i == r.selection.chosen_index ? "  <- chosen" : "") << '\n';
  }
  if (r.truth) {
    s << "\nK_hat=" << r.k_hat() << "  G=" << r.truth->g_true << "  ARI=" << std::setprecision(4) << r.truth->ari
      << "  |RN|=" << r.truth->abs_rn << '\n';
  } else {
    s << "\nK_hat=" << r.k_hat() << '\n';
  }
  out << s.str();
}

}  // namespace cdpp
