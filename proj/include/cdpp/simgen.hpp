#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "cdpp/data.hpp"
#include "cdpp/error.hpp"
#include "cdpp/rng.hpp"

namespace cdpp {

enum class Level { Low, Medium, Large };

inline const char* to_string(Level l) noexcept {
  switch (l) {
    case Level::Low: return "low";
    case Level::Medium: return "medium";
    case Level::Large: return "large";
  }
  return "unknown";
}

inline Level parse_level(const std::string& s) {
  if (s == "low") return Level::Low;
  if (s == "medium") return Level::Medium;
  if (s == "large") return Level::Large;
  detail::fail(ErrorKind::Config, "unknown level '" + s + "' (expected low, medium or large)");
}

struct Range {
  std::size_t lo = 0;
  std::size_t hi = 0;
};

inline Range dimension_range(Level l) {
  switch (l) {
    case Level::Low: return {2, 7};
    case Level::Medium: return {8, 12};
    case Level::Large: return {13, 20};
  }
  return {2, 7};
}

inline Range component_range(Level l) {
  switch (l) {
    case Level::Low: return {2, 5};
    case Level::Medium: return {6, 10};
    case Level::Large: return {11, 20};
  }
  return {2, 5};
}

// One cell of the simulation design. p and K are drawn uniformly from the
// level's range unless pinned through `p` / `k`.
struct ScenarioSpec {
  int id = -1;
  std::size_t n = 150;
  Level p_level = Level::Low;
  Level k_level = Level::Low;
  double max_pairwise_overlap = 0.01;
  std::size_t replicas = 10;
  std::optional<std::size_t> p;
  std::optional<std::size_t> k;
};

inline void validate(const ScenarioSpec& s) {
  if (s.n < 2) detail::fail(ErrorKind::Config, "scenario needs n >= 2");
  if (!(s.max_pairwise_overlap > 0.0 && s.max_pairwise_overlap < 1.0))
    detail::fail(ErrorKind::Config, "max pairwise overlap must lie in (0, 1)");
  if (s.p && *s.p < 1) detail::fail(ErrorKind::Config, "pinned p must be positive");
  if (s.k && (*s.k < 1 || *s.k > s.n)) detail::fail(ErrorKind::Config, "pinned K must lie in [1, n]");
}

/// The 3 x 3 x 3 design over n, dimension level and component level, minus the
/// three (n = 150, large K) cells. Ids run 0..23 in (n, K level, p level) order.
inline std::vector<ScenarioSpec> scenario_grid() {
  std::vector<ScenarioSpec> out;
  const Level levels[] = {Level::Low, Level::Medium, Level::Large};
  for (std::size_t n : {std::size_t{150}, std::size_t{500}, std::size_t{1500}}) {
    for (Level kl : levels) {
      if (n == 150 && kl == Level::Large) continue;
      for (Level pl : levels) {
        ScenarioSpec s;
        s.id = static_cast<int>(out.size());
        s.n = n;
        s.p_level = pl;
        s.k_level = kl;
        out.push_back(s);
      }
    }
  }
  return out;
}

struct MixtureModel {
  std::vector<Vector> means;
  std::vector<Matrix> covariances;
  std::vector<double> weights;

  std::size_t k() const noexcept { return weights.size(); }
  std::size_t p() const noexcept { return means.empty() ? 0 : static_cast<std::size_t>(means.front().size()); }
};

struct LabeledDataset {
  DataMatrix data;
  std::vector<int> true_labels;
  MixtureModel model;
  std::vector<std::size_t> counts;
  double max_overlap = 0.0;       // largest estimated pairwise overlap at acceptance
  std::size_t shrink_steps = 0;   // covariance shrink steps applied to the accepted model
  std::size_t model_draws = 0;    // models drawn, including the accepted one
};

struct GenerationOptions {
  std::size_t overlap_samples = 10000;
  double shrink_factor = 0.9;
  std::size_t max_shrink_steps = 200;
  std::size_t max_model_draws = 100;
  std::size_t max_multinomial_attempts = 1000;
};

namespace detail {

// Cholesky factor and log-normaliser of one Gaussian component.
struct GaussianFactor {
  Vector mean;
  Matrix chol;  // lower
  double log_norm = 0.0;

  GaussianFactor(const Vector& mu, const Matrix& cov) : mean(mu) {
    Eigen::LLT<Matrix> llt(cov);
    if (llt.info() != Eigen::Success) fail(ErrorKind::NumericalFailure, "covariance is not positive definite");
    chol = llt.matrixL();
    const double p = static_cast<double>(mu.size());
    log_norm = -0.5 * p * std::log(2.0 * std::numbers::pi) - chol.diagonal().array().log().sum();
  }

  double log_density(const Vector& x) const {
    const Vector z = chol.triangularView<Eigen::Lower>().solve(x - mean);
    return log_norm - 0.5 * z.squaredNorm();
  }

  Vector draw(RngStream& rng) const {
    Vector z(mean.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
    return mean + chol * z;
  }
};

// Fraction of m draws from component `from` that the weighted densities assign
// to `to`. Exact ties count as half a misclassification, so two identical
// components overlap by 1 in total.
inline double misclassification(const GaussianFactor& to, double log_w_to, const GaussianFactor& from, double log_w_from,
                                std::size_t m, RngStream& rng) {
  std::size_t wins = 0;
  std::size_t ties = 0;
  for (std::size_t s = 0; s < m; ++s) {
    const Vector x = from.draw(rng);
    const double a = log_w_to + to.log_density(x);
    const double b = log_w_from + from.log_density(x);
    if (a > b) ++wins;
    else if (a == b) ++ties;
  }
  return (static_cast<double>(wins) + 0.5 * static_cast<double>(ties)) / static_cast<double>(m);
}

// Standard Wishart with `df` degrees of freedom by the Bartlett decomposition.
inline Matrix wishart_identity(std::size_t p, double df, RngStream& rng) {
  const auto pp = static_cast<Eigen::Index>(p);
  Matrix a = Matrix::Zero(pp, pp);
  for (Eigen::Index i = 0; i < pp; ++i) {
    std::chi_squared_distribution<double> chi2(df - static_cast<double>(i));
    a(i, i) = std::sqrt(chi2(rng.engine()));
    for (Eigen::Index j = 0; j < i; ++j) a(i, j) = rng.normal();
  }
  return a * a.transpose();
}

// Dirichlet(1, ..., 1) conditioned on every weight >= floor: the flat Dirichlet
// is uniform on the simplex, so the conditional law is the affine image
// floor + (1 - K floor) * Dirichlet(1, ..., 1).
inline std::vector<double> floored_flat_dirichlet(std::size_t k, double floor, RngStream& rng) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(k);
  double sum = 0.0;
  for (auto& v : w) {
    v = expo(rng.engine());
    sum += v;
  }
  const double free_mass = 1.0 - static_cast<double>(k) * floor;
  for (auto& v : w) v = floor + free_mass * v / sum;
  return w;
}

inline std::vector<std::size_t> multinomial(std::size_t n, const std::vector<double>& weights, RngStream& rng) {
  std::vector<std::size_t> counts(weights.size(), 0);
  std::size_t left = n;
  double mass = 1.0;
  for (std::size_t k = 0; k + 1 < weights.size(); ++k) {
    const double p = std::clamp(weights[k] / mass, 0.0, 1.0);
    counts[k] = std::binomial_distribution<std::size_t>(left, p)(rng.engine());
    left -= counts[k];
    mass -= weights[k];
  }
  counts.back() = left;
  return counts;
}

}  // namespace detail

/// Monte-Carlo pairwise overlap w_{k|l} + w_{l|k}, where w_{k|l} is the share of
/// m draws from component l that pi_k phi(x; mu_k, V_k) claims over pi_l phi(x; mu_l, V_l).
inline double estimate_overlap(const MixtureModel& model, std::size_t k, std::size_t l, std::size_t m, RngStream& rng) {
  if (k == l || k >= model.k() || l >= model.k()) detail::fail(ErrorKind::Config, "overlap needs two distinct components");
  if (m < 1000) detail::fail(ErrorKind::Config, "overlap estimation needs at least 1000 draws");
  const detail::GaussianFactor fk(model.means[k], model.covariances[k]);
  const detail::GaussianFactor fl(model.means[l], model.covariances[l]);
  const double wk = std::log(model.weights[k]);
  const double wl = std::log(model.weights[l]);
  return detail::misclassification(fk, wk, fl, wl, m, rng) + detail::misclassification(fl, wl, fk, wk, m, rng);
}

// Per-component size floor: ceil(sqrt(n)) + 2, capped at floor(n / (2K)) so the
// constraint stays satisfiable for many components.
inline std::size_t balance_floor(std::size_t n, std::size_t k) {
  const auto root = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n)) - 1e-9)) + 2;
  return std::max<std::size_t>(1, std::min(root, n / (2 * k)));
}

namespace detail {

inline bool overlaps_within(const MixtureModel& model, double bound, std::size_t m, RngStream& rng, double& worst) {
  worst = 0.0;
  for (std::size_t a = 0; a < model.k(); ++a) {
    for (std::size_t b = a + 1; b < model.k(); ++b) {
      const double w = estimate_overlap(model, a, b, m, rng);
      worst = std::max(worst, w);
      if (w > bound) return false;
    }
  }
  return true;
}

}  // namespace detail

/// Draws a labelled Gaussian-mixture dataset for one scenario: uniform means in
/// the unit hypercube, standard Wishart(p + 1) covariances, flat-Dirichlet
/// weights and multinomial component counts. Covariances are shrunk by a common
/// factor until every pairwise overlap is within the scenario bound; models that
/// cannot be repaired are redrawn. Component counts below balance_floor() are
/// redrawn as well.
inline LabeledDataset generate_mixture(const ScenarioSpec& spec, RngStream& rng, const GenerationOptions& opts = {}) {
  validate(spec);
  const Range pr = dimension_range(spec.p_level);
  const Range kr = component_range(spec.k_level);
  const std::size_t p = spec.p ? *spec.p : static_cast<std::size_t>(rng.uniform_int(pr.lo, pr.hi));
  const std::size_t k = spec.k ? *spec.k : static_cast<std::size_t>(rng.uniform_int(kr.lo, kr.hi));
  const std::size_t n = spec.n;
  const auto pp = static_cast<Eigen::Index>(p);

  const std::size_t floor_count = balance_floor(n, k);
  const double weight_floor =
      k > 1 ? std::min((static_cast<double>(floor_count) + 3.0 * std::sqrt(static_cast<double>(floor_count))) /
                           static_cast<double>(n),
                       0.9 / static_cast<double>(k))
            : 0.0;

  for (std::size_t draw = 1; draw <= opts.max_model_draws; ++draw) {
    MixtureModel model;
    for (std::size_t c = 0; c < k; ++c) {
      Vector mu(pp);
      for (Eigen::Index d = 0; d < pp; ++d) mu(d) = rng.uniform();
      model.means.push_back(std::move(mu));
      model.covariances.push_back(detail::wishart_identity(p, static_cast<double>(p + 1), rng));
    }
    model.weights = k > 1 ? detail::floored_flat_dirichlet(k, weight_floor, rng) : std::vector<double>{1.0};

    double worst = 0.0;
    std::size_t steps = 0;
    bool accepted = k == 1;
    while (!accepted) {
      if (detail::overlaps_within(model, spec.max_pairwise_overlap, opts.overlap_samples, rng, worst)) {
        accepted = true;
        break;
      }
      if (steps == opts.max_shrink_steps) break;
      for (auto& cov : model.covariances) cov *= opts.shrink_factor;
      ++steps;
    }
    if (!accepted) continue;

    std::vector<std::size_t> counts;
    bool balanced = false;
    for (std::size_t attempt = 0; attempt < opts.max_multinomial_attempts && !balanced; ++attempt) {
      counts = detail::multinomial(n, model.weights, rng);
      balanced = k == 1 || std::all_of(counts.begin(), counts.end(), [&](std::size_t c) { return c >= floor_count; });
    }
    if (!balanced) continue;

    std::vector<int> labels;
    labels.reserve(n);
    for (std::size_t c = 0; c < k; ++c) labels.insert(labels.end(), counts[c], static_cast<int>(c));
    for (std::size_t i = n; i > 1; --i) {
      const auto j = static_cast<std::size_t>(rng.uniform_int(0, i - 1));
      std::swap(labels[i - 1], labels[j]);
    }

    std::vector<detail::GaussianFactor> factors;
    factors.reserve(k);
    for (std::size_t c = 0; c < k; ++c) factors.emplace_back(model.means[c], model.covariances[c]);
    RowMatrix x(static_cast<Eigen::Index>(n), pp);
    for (std::size_t i = 0; i < n; ++i) x.row(static_cast<Eigen::Index>(i)) = factors[static_cast<std::size_t>(labels[i])].draw(rng).transpose();

    LabeledDataset out{DataMatrix(std::move(x)), std::move(labels), std::move(model), std::move(counts), worst, steps, draw};
    return out;
  }
  detail::fail(ErrorKind::GenerationExhausted,
               "no mixture met the overlap and balance constraints after " + std::to_string(opts.max_model_draws) +
                   " model draws (p=" + std::to_string(p) + ", K=" + std::to_string(k) + ")");
}

}  // namespace cdpp
