#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "bridge_rate/error.hpp"
#include "bridge_rate/functionals.hpp"
#include "bridge_rate/lattice_law.hpp"
#include "bridge_rate/local_limit.hpp"
#include "bridge_rate/numeric.hpp"
#include "bridge_rate/parallel.hpp"
#include "bridge_rate/path.hpp"
#include "bridge_rate/path_sim.hpp"
#include "bridge_rate/rng.hpp"

namespace bridge_rate {

struct MonteCarloEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

inline MonteCarloEstimate summarize(std::span<const double> values) {
  MonteCarloEstimate out;
  out.samples = values.size();
  if (values.empty()) return out;
  CompensatedSum sum;
  for (double v : values) sum += v;
  const double mean = sum.value() / static_cast<double>(values.size());
  CompensatedSum sq;
  for (double v : values) sq += (v - mean) * (v - mean);
  out.estimate = mean;
  if (values.size() > 1) {
    const double var = sq.value() / static_cast<double>(values.size() - 1);
    out.std_error = std::sqrt(var / static_cast<double>(values.size()));
  }
  return out;
}

inline constexpr double kEnumerationLimit = 1e7;

/// Calls visit(indices, prob) for every increment sequence of the given
/// length, in lexicographic atom order.
inline void enumerate_sequences(const LatticeLaw& law, std::int64_t length,
                                const std::function<void(std::span<const std::int64_t>, double)>& visit) {
  const auto atoms = law.atoms();
  if (std::pow(static_cast<double>(atoms.size()), static_cast<double>(length)) > kEnumerationLimit) {
    fail(ErrorCode::TooLarge, "enumeration of " + std::to_string(atoms.size()) + "^" +
                                  std::to_string(length) + " sequences exceeds 1e7");
  }
  const auto len = static_cast<std::size_t>(length);
  std::vector<std::size_t> digit(len, 0);
  std::vector<std::int64_t> idx(len);
  while (true) {
    double prob = 1.0;
    for (std::size_t k = 0; k < len; ++k) {
      idx[k] = atoms[digit[k]].index;
      prob *= atoms[digit[k]].prob;
    }
    visit(idx, prob);
    std::size_t pos = len;
    while (pos > 0) {
      --pos;
      if (++digit[pos] < atoms.size()) break;
      digit[pos] = 0;
      if (pos == 0) return;
    }
    if (len == 0) return;
  }
}

/// S-bar^+_m(t) = (1/sqrt m) sum_{i <= ceil(m t)} X_i for a walk of m steps.
inline double splus_value(const LatticeLaw& law, std::span<const std::int64_t> indices,
                          std::int64_t steps, double t) {
  const std::int64_t c = lattice_ceil(static_cast<double>(steps) * t);
  std::int64_t sum = 0;
  for (std::int64_t k = 0; k < c; ++k) sum += indices[static_cast<std::size_t>(k)];
  return law.sum_value(c, sum) / std::sqrt(static_cast<double>(steps));
}

/// E[F(S_{kappa n | t}) | S_{kappa n}(1) = 0] by summing over every
/// increment sequence that ends at 0.
inline double conditioned_expectation_enum(const LatticeLaw& law, std::int64_t n, double t,
                                           const TestFunctional& f) {
  require(t >= 0.0 && t <= 1.0, "conditioned_expectation_enum: t must lie in [0,1]");
  const std::int64_t m = kappa(law) * n;
  std::int64_t target = 0;
  zero_index_target(law, m, target);
  CompensatedSum num, den;
  enumerate_sequences(law, m, [&](std::span<const std::int64_t> idx, double prob) {
    std::int64_t total = 0;
    for (auto k : idx) total += k;
    if (total != target) return;
    const auto path = path_from_indices(law, idx, m, PathKind::conditioned_walk);
    num += prob * f(restrict(path, t));
    den += prob;
  });
  return num.value() / den.value();
}

struct LemmaSides {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual() const { return std::fabs(lhs - rhs); }
};

/// Both sides of the de-conditioning identity
/// E[F(S_{|t}) | S(1) = 0] = E[F(S_{|t}) L^n_t(S-bar^+(t))], each by exact
/// enumeration: the left over full sequences, the right over the
/// ceil(kappa n t)-step prefixes that determine S_{|t}.
inline LemmaSides lemma1_sides(const LatticeLaw& law, std::int64_t n, double t, const TestFunctional& f) {
  require(t > 0.0 && t < 1.0, "lemma1: t must lie in (0,1)");
  LemmaSides sides;
  sides.lhs = conditioned_expectation_enum(law, n, t, f);

  const DiscreteWeight weight(law, n, t);
  const std::int64_t m = weight.walk_steps();
  const std::int64_t c = weight.prefix_steps();
  const double inv_root = 1.0 / std::sqrt(static_cast<double>(m));
  CompensatedSum rhs;
  enumerate_sequences(law, c, [&](std::span<const std::int64_t> idx, double prob) {
    std::vector<double> values(static_cast<std::size_t>(m + 1), 0.0);
    std::int64_t running = 0;
    for (std::int64_t k = 0; k < c; ++k) {
      running += idx[static_cast<std::size_t>(k)];
      values[static_cast<std::size_t>(k + 1)] = law.sum_value(k + 1, running) * inv_root;
    }
    // knots after ceil(m t) are overwritten by restrict
    for (std::int64_t k = c + 1; k <= m; ++k) values[static_cast<std::size_t>(k)] = values[static_cast<std::size_t>(c)];
    const auto path = PathSample::on_grid(std::move(values), PathKind::walk);
    const double w = weight.from_prefix_index(running);
    if (w != 0.0) rhs += prob * f(restrict(path, t)) * w;
  });
  sides.rhs = rhs.value();
  return sides;
}

inline double lemma1_residual(const LatticeLaw& law, std::int64_t n, double t, const TestFunctional& f) {
  return lemma1_sides(law, n, t, f).residual();
}

struct WeightedEstimate : MonteCarloEstimate {
  double min_weight = 0.0;
  double mean_weight = 0.0;
};

/// Monte Carlo mean of F(S_{|t}) L^n_t(S-bar^+(t)) over unconditioned walks.
inline WeightedEstimate weighted_expectation(const LatticeLaw& law, std::int64_t n, double t,
                                             const TestFunctional& f, std::size_t samples,
                                             const RngStream& rng) {
  require(t > 0.0 && t < 1.0, "weighted_expectation: t must lie in (0,1)");
  require(samples >= 2, "weighted_expectation: need at least 2 samples");
  const DiscreteWeight weight(law, n, t);
  const std::int64_t m = weight.walk_steps();
  const std::int64_t c = weight.prefix_steps();
  std::vector<double> values(samples), weights(samples);
  parallel_for(samples, [&](std::size_t i) {
    RngStream sub = rng.substream(i);
    const auto idx = sample_walk_indices(law, m, sub);
    std::int64_t prefix = 0;
    for (std::int64_t k = 0; k < c; ++k) prefix += idx[static_cast<std::size_t>(k)];
    const double w = weight.from_prefix_index(prefix);
    weights[i] = w;
    const auto path = path_from_indices(law, idx, m, PathKind::walk);
    values[i] = f(restrict(path, t)) * w;
  });
  WeightedEstimate out;
  static_cast<MonteCarloEstimate&>(out) = summarize(values);
  out.min_weight = *std::min_element(weights.begin(), weights.end());
  out.mean_weight = summarize(weights).estimate;
  return out;
}

/// Monte Carlo mean of F(B_{|t}) L_t(B_t) over Brownian motions on a grid.
inline MonteCarloEstimate bridge_weighted_expectation(double t, const TestFunctional& f,
                                                      std::size_t samples, std::int64_t grid_n,
                                                      const RngStream& rng) {
  require(t > 0.0 && t < 1.0, "bridge_weighted_expectation: t must lie in (0,1)");
  require(samples >= 2, "bridge_weighted_expectation: need at least 2 samples");
  std::vector<double> values(samples);
  parallel_for(samples, [&](std::size_t i) {
    RngStream sub = rng.substream(i);
    const auto b = sample_brownian_motion(grid_n, sub);
    values[i] = f(restrict(b, t)) * weight_L(t, b.at(t));
  });
  return summarize(values);
}

/// Direct Monte Carlo of E[F(B^br_{|t})] with the bridge sampler.
inline MonteCarloEstimate bridge_expectation(double t, const TestFunctional& f, std::size_t samples,
                                             std::int64_t grid_n, const RngStream& rng) {
  require(samples >= 2, "bridge_expectation: need at least 2 samples");
  std::vector<double> values(samples);
  parallel_for(samples, [&](std::size_t i) {
    RngStream sub = rng.substream(i);
    values[i] = f(restrict(sample_brownian_bridge(grid_n, sub), t));
  });
  return summarize(values);
}

}  // namespace bridge_rate
