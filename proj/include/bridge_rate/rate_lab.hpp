#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "bridge_rate/error.hpp"
#include "bridge_rate/fm_distance.hpp"
#include "bridge_rate/lattice_law.hpp"
#include "bridge_rate/local_limit.hpp"
#include "bridge_rate/numeric.hpp"
#include "bridge_rate/path_sim.hpp"
#include "bridge_rate/rn_weighting.hpp"

namespace bridge_rate {

struct SlopeFit {
  double slope = 0.0;
  double std_error = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares of log(value) on log(n).
inline SlopeFit loglog_slope(std::span<const std::pair<double, double>> pairs) {
  require(pairs.size() >= 4, "loglog_slope: need at least 4 points");
  std::vector<double> x, y;
  for (const auto& [n, v] : pairs) {
    require(n > 0.0, "loglog_slope: n must be > 0");
    require(v > 0.0, "loglog_slope: values must be > 0");
    x.push_back(std::log(n));
    y.push_back(std::log(v));
  }
  const double k = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  require(sxx > 0.0, "loglog_slope: all n are equal");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    rss += r * r;
  }
  fit.std_error = std::sqrt(rss / (k - 2.0) / sxx);
  return fit;
}

/// Cut-off exponent used in the tau bounds: 1/6 for Rademacher, 1/12 for
/// Poisson-minus-one (and 1/6 for custom laws).
inline double default_delta(const LatticeLaw& law) {
  return law.family() == LawFamily::poisson_minus_one ? 1.0 / 12.0 : 1.0 / 6.0;
}

struct RateTableRow {
  std::int64_t n = 0;
  double fm_value = 0.0;
  double fm_half_width = 0.0;
  double rho_value = 0.0;
  double tau_value = 0.0;
  double wallclock_s = 0.0;
};

struct ConvergenceOptions {
  std::size_t reps = 20;
  /// 0 selects max(256, n).
  std::int64_t grid_bridge = 0;
  /// 0 selects default_delta(law).
  double delta = 0.0;
  QuadratureSpec quad{};
};

/// FM distance (with bootstrap half-width) between conditioned walks and
/// Brownian bridges, alongside rho and tau at s = 1, for each n.
inline std::vector<RateTableRow> convergence_table(const LatticeLaw& law, const std::vector<std::int64_t>& n_list,
                                                   std::size_t m_samples, const RngStream& rng,
                                                   const ConvergenceOptions& options = {}) {
  require(!n_list.empty(), "convergence_table: empty n list");
  const double delta = options.delta > 0.0 ? options.delta : default_delta(law);
  std::vector<RateTableRow> rows;
  for (std::size_t r = 0; r < n_list.size(); ++r) {
    const auto start = std::chrono::steady_clock::now();
    const std::int64_t n = n_list[r];
    const std::int64_t grid = options.grid_bridge > 0 ? options.grid_bridge : std::max<std::int64_t>(256, n);
    const ConditionedSampler walks(law, n);
    PathSampler walk_sampler = [&walks](RngStream& s) { return walks.sample(s); };
    PathSampler bridge_sampler = [grid](RngStream& s) { return sample_brownian_bridge(grid, s); };
    const auto fm = fm_bootstrap(walk_sampler, bridge_sampler, m_samples, m_samples, options.reps,
                                 rng.substream(static_cast<std::uint64_t>(n)));
    RateTableRow row;
    row.n = n;
    row.fm_value = fm.value;
    row.fm_half_width = fm.half_width;
    row.rho_value = rho(law, n);
    row.tau_value = tau(law, n, delta, 1.0, options.quad);
    row.wallclock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rows.push_back(row);
  }
  return rows;
}

/// Accepts a decreasing sequence in which at most one step goes up, and that
/// one only by less than the two rows' combined half-widths.
inline bool fm_trend_decreasing(const std::vector<RateTableRow>& rows) {
  int inversions = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].fm_value < rows[i - 1].fm_value) continue;
    ++inversions;
    if (rows[i].fm_value - rows[i - 1].fm_value > rows[i].fm_half_width + rows[i - 1].fm_half_width) return false;
  }
  return inversions <= 1;
}

struct GcCheckResult {
  DistanceEstimate estimate;  ///< empirical process vs conditioned Poisson walk
  DistanceEstimate baseline;  ///< empirical process vs an independent copy
  bool indistinguishable = false;
};

/// The empirical process b_n and the Poisson-minus-one walk conditioned on
/// S_n(1) = 0 have the same law; checks that their FM distance is no larger
/// than the same-law baseline up to twice the combined half-widths.
inline GcCheckResult gc_equivalence_check(std::int64_t n, std::size_t m_samples, const RngStream& rng,
                                          std::size_t reps = 20) {
  const auto law = make_poisson_minus_one();
  const ConditionedSampler walks(law, n);
  PathSampler empirical = [n](RngStream& s) { return sample_empirical_process(n, s); };
  PathSampler walk = [&walks](RngStream& s) { return walks.sample(s); };
  GcCheckResult out;
  out.estimate = fm_bootstrap(empirical, walk, m_samples, m_samples, reps, rng.substream(0));
  out.baseline = fm_bootstrap(empirical, empirical, m_samples, m_samples, reps, rng.substream(1));
  out.indistinguishable = out.estimate.value <=
                          out.baseline.value + 2.0 * (out.estimate.half_width + out.baseline.half_width);
  return out;
}

/// Exact total-variation distance between the grid law of b_n (multinomial
/// bin counts) and the grid law of the conditioned Poisson-minus-one walk
/// (enumerated over truncated increments). Both laws are keyed by the
/// increment vector.
inline double gc_exact_tv(std::int64_t n, int truncation_k = 30) {
  require(n >= 1 && n <= 4, "gc_exact_tv: enumeration supports 1 <= n <= 4");
  std::map<std::vector<std::int64_t>, double> empirical, walk;

  // Multinomial(n; 1/n, ..., 1/n) over bin counts c_1..c_n.
  std::vector<std::int64_t> counts(static_cast<std::size_t>(n), 0);
  const double log_n_fact = std::lgamma(static_cast<double>(n) + 1.0);
  auto visit = [&](auto&& self, std::size_t pos, std::int64_t left) -> void {
    if (pos + 1 == counts.size()) {
      counts[pos] = left;
      double log_p = log_n_fact - static_cast<double>(n) * std::log(static_cast<double>(n));
      std::vector<std::int64_t> incr(counts.size());
      for (std::size_t i = 0; i < counts.size(); ++i) {
        log_p -= std::lgamma(static_cast<double>(counts[i]) + 1.0);
        incr[i] = counts[i] - 1;
      }
      empirical[incr] += std::exp(log_p);
      return;
    }
    for (std::int64_t c = 0; c <= left; ++c) {
      counts[pos] = c;
      self(self, pos + 1, left - c);
    }
  };
  visit(visit, 0, n);

  const auto law = make_poisson_minus_one(truncation_k);
  CompensatedSum zero_mass;
  enumerate_sequences(law, n, [&](std::span<const std::int64_t> idx, double prob) {
    std::int64_t total = 0;
    for (auto k : idx) total += k;
    if (total != 0) return;
    walk[std::vector<std::int64_t>(idx.begin(), idx.end())] += prob;
    zero_mass += prob;
  });
  for (auto& [key, p] : walk) p /= zero_mass.value();

  CompensatedSum tv;
  for (const auto& [key, p] : empirical) {
    const auto it = walk.find(key);
    tv += std::fabs(p - (it == walk.end() ? 0.0 : it->second));
  }
  for (const auto& [key, q] : walk) {
    if (!empirical.contains(key)) tv += q;
  }
  return 0.5 * tv.value();
}

struct SpotcheckRow {
  std::int64_t n = 0;
  double t_n = 0.0;
  double lhs = 0.0;
  double lhs_se = 0.0;
  double rhs = 0.0;
  double rhs_se = 0.0;
  bool exact = false;
  bool pass = false;
};

/// t_n = 1 - n^{-1/9}.
inline double spotcheck_time(std::int64_t n) {
  return 1.0 - std::pow(static_cast<double>(n), -1.0 / 9.0);
}

namespace detail {
inline std::pair<double, double> spotcheck_terms(const PathSample& path, double t_n) {
  return {path_supnorm(path, restrict(path, t_n)), supnorm(restrict(path, 1.0 - t_n))};
}
}  // namespace detail

/// Monte Carlo check of
///   E[|S - S_{|t_n}|_inf | S(1) = 0] <= 2 E[|S_{|1-t_n}|_inf | S(1) = 0]
/// under the exact conditioned sampler: passes when LHS <= 2 RHS plus three
/// combined standard errors.
inline std::vector<SpotcheckRow> inequality_spotchecks(const LatticeLaw& law, const std::vector<std::int64_t>& n_list,
                                                       std::size_t m_samples, const RngStream& rng) {
  require(m_samples >= 2, "inequality_spotchecks: need at least 2 samples");
  std::vector<SpotcheckRow> rows;
  for (const auto n : n_list) {
    const ConditionedSampler walks(law, n);
    const double t_n = spotcheck_time(n);
    std::vector<double> lhs(m_samples), rhs(m_samples);
    const RngStream stream = rng.substream(static_cast<std::uint64_t>(n));
    parallel_for(m_samples, [&](std::size_t i) {
      RngStream sub = stream.substream(i);
      std::tie(lhs[i], rhs[i]) = detail::spotcheck_terms(walks.sample(sub), t_n);
    });
    const auto l = summarize(lhs);
    const auto r = summarize(rhs);
    SpotcheckRow row;
    row.n = n;
    row.t_n = t_n;
    row.lhs = l.estimate;
    row.lhs_se = l.std_error;
    row.rhs = r.estimate;
    row.rhs_se = r.std_error;
    const double combined = std::sqrt(l.std_error * l.std_error + 4.0 * r.std_error * r.std_error);
    row.pass = row.lhs <= 2.0 * row.rhs + 3.0 * combined;
    rows.push_back(row);
  }
  return rows;
}

/// The same inequality with both sides summed exactly over all bridges.
inline SpotcheckRow inequality_exact(const LatticeLaw& law, std::int64_t n) {
  const std::int64_t m = kappa(law) * n;
  std::int64_t target = 0;
  zero_index_target(law, m, target);
  const double t_n = spotcheck_time(n);
  CompensatedSum lhs, rhs, mass;
  enumerate_sequences(law, m, [&](std::span<const std::int64_t> idx, double prob) {
    std::int64_t total = 0;
    for (auto k : idx) total += k;
    if (total != target) return;
    const auto [a, b] = detail::spotcheck_terms(path_from_indices(law, idx, m, PathKind::conditioned_walk), t_n);
    lhs += prob * a;
    rhs += prob * b;
    mass += prob;
  });
  SpotcheckRow row;
  row.n = n;
  row.t_n = t_n;
  row.lhs = lhs.value() / mass.value();
  row.rhs = rhs.value() / mass.value();
  row.exact = true;
  row.pass = row.lhs <= 2.0 * row.rhs + 1e-12;
  return row;
}

}  // namespace bridge_rate
