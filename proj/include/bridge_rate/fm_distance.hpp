#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include "bridge_rate/error.hpp"
#include "bridge_rate/numeric.hpp"
#include "bridge_rate/parallel.hpp"
#include "bridge_rate/path.hpp"
#include "bridge_rate/rng.hpp"
#include "bridge_rate/transport.hpp"

namespace bridge_rate {

/// Weighted finite collection of paths standing for a law on C([0,1]).
struct EmpiricalMeasure {
  std::vector<PathSample> paths;
  std::vector<double> weights;

  static EmpiricalMeasure uniform(std::vector<PathSample> paths) {
    EmpiricalMeasure m;
    const double w = 1.0 / static_cast<double>(paths.size());
    m.weights.assign(paths.size(), w);
    m.paths = std::move(paths);
    return m;
  }

  void validate() const {
    require(!paths.empty(), "empirical measure has no atoms");
    require(paths.size() == weights.size(), "empirical measure: weights/paths size mismatch");
    CompensatedSum total;
    for (double w : weights) {
      require(w >= 0.0, "empirical measure: negative weight");
      total += w;
    }
    require(std::fabs(total.value() - 1.0) <= 1e-12, "empirical measure: weights do not sum to 1");
    for (const auto& p : paths) {
      require(p.times.size() == p.values.size() && p.times.size() >= 2 && p.times.front() == 0.0 &&
                  p.times.back() == 1.0,
              "empirical measure: malformed path");
    }
  }
};

enum class DistanceKind { fm, w1 };
enum class SolverStatus { optimal, tol_reached };

struct DistanceEstimate {
  double value = 0.0;
  DistanceKind kind = DistanceKind::fm;
  SolverStatus solver_status = SolverStatus::optimal;
  double half_width = 0.0;
  std::size_t m = 0;
  std::size_t k = 0;
};

inline constexpr std::size_t kDistanceAtomCap = 4000;

namespace detail {

inline bool same_path(const PathSample& a, const PathSample& b) {
  return a.times == b.times && a.values == b.values;
}

/// Merges identical paths, summing their weights.
inline EmpiricalMeasure deduplicate(const EmpiricalMeasure& mu) {
  std::vector<std::size_t> order(mu.paths.size());
  std::iota(order.begin(), order.end(), 0);
  auto less = [&](std::size_t i, std::size_t j) {
    const auto& a = mu.paths[i];
    const auto& b = mu.paths[j];
    if (a.times != b.times) return a.times < b.times;
    return a.values < b.values;
  };
  std::stable_sort(order.begin(), order.end(), less);
  EmpiricalMeasure out;
  for (std::size_t idx : order) {
    if (mu.weights[idx] == 0.0) continue;
    if (!out.paths.empty() && same_path(out.paths.back(), mu.paths[idx])) {
      out.weights.back() += mu.weights[idx];
    } else {
      out.paths.push_back(mu.paths[idx]);
      out.weights.push_back(mu.weights[idx]);
    }
  }
  return out;
}

/// Integer masses summing exactly to `total`, by largest remainder.
inline std::vector<std::int64_t> integer_masses(std::span<const double> weights, std::int64_t total) {
  CompensatedSum sum;
  for (double w : weights) sum += w;
  const double norm = sum.value();
  std::vector<std::int64_t> out(weights.size());
  std::vector<std::pair<double, std::size_t>> rem(weights.size());
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = weights[i] / norm * static_cast<double>(total);
    out[i] = static_cast<std::int64_t>(std::floor(exact));
    rem[i] = {exact - static_cast<double>(out[i]), i};
    assigned += out[i];
  }
  std::sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  // sum of floors never exceeds total, so only a deficit needs handing out
  for (std::size_t r = 0; assigned < total; ++r, ++assigned) ++out[rem[r % rem.size()].second];
  return out;
}

inline double max_abs_diff(const double* a, const double* b, std::size_t n) {
  double m0 = 0.0, m1 = 0.0, m2 = 0.0, m3 = 0.0;
  std::size_t t = 0;
  for (; t + 4 <= n; t += 4) {
    const double d0 = std::fabs(a[t] - b[t]);
    const double d1 = std::fabs(a[t + 1] - b[t + 1]);
    const double d2 = std::fabs(a[t + 2] - b[t + 2]);
    const double d3 = std::fabs(a[t + 3] - b[t + 3]);
    m0 = d0 > m0 ? d0 : m0;
    m1 = d1 > m1 ? d1 : m1;
    m2 = d2 > m2 ? d2 : m2;
    m3 = d3 > m3 ? d3 : m3;
  }
  for (; t < n; ++t) {
    const double d = std::fabs(a[t] - b[t]);
    m0 = d > m0 ? d : m0;
  }
  return std::max(std::max(m0, m1), std::max(m2, m3));
}

}  // namespace detail

/// Pairwise sup-norm distances between the atoms of two measures, row-major
/// (mu atoms by nu atoms). Paths are resampled on the union of all knots
/// when that stays small, which gives the exact sup-norm of the difference
/// of the linear interpolants; otherwise each pair is merged separately.
inline std::vector<double> supnorm_matrix(const std::vector<PathSample>& a,
                                          const std::vector<PathSample>& b) {
  std::vector<double> out(a.size() * b.size());
  std::vector<double> knots;
  std::size_t max_knots = 0;
  std::vector<std::int64_t> grids;
  bool all_uniform = true;
  for (const auto* side : {&a, &b}) {
    for (const auto& p : *side) {
      max_knots = std::max(max_knots, p.times.size());
      if (p.is_uniform_grid()) {
        grids.push_back(p.grid_n);
      } else {
        all_uniform = false;
      }
    }
  }
  if (all_uniform) {
    std::sort(grids.begin(), grids.end());
    grids.erase(std::unique(grids.begin(), grids.end()), grids.end());
    for (auto g : grids) {
      for (std::int64_t k = 0; k <= g; ++k) knots.push_back(static_cast<double>(k) / static_cast<double>(g));
    }
  } else {
    for (const auto* side : {&a, &b}) {
      for (const auto& p : *side) knots.insert(knots.end(), p.times.begin(), p.times.end());
      if (knots.size() > 16 * max_knots + 1024) break;
    }
  }
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  if (knots.size() > 8 * max_knots + 1024) {
    parallel_for(a.size(), [&](std::size_t i) {
      for (std::size_t j = 0; j < b.size(); ++j) out[i * b.size() + j] = path_supnorm(a[i], b[j]);
    });
    return out;
  }

  const std::size_t len = knots.size();
  auto resample = [&](const std::vector<PathSample>& side) {
    std::vector<double> rows(side.size() * len);
    parallel_for(side.size(), [&](std::size_t i) {
      const auto& p = side[i];
      std::size_t idx = 0;
      for (std::size_t t = 0; t < len; ++t) {
        const double time = knots[t];
        while (idx + 1 < p.times.size() && p.times[idx + 1] <= time) ++idx;
        double v;
        if (idx + 1 >= p.times.size() || p.times[idx] == time) {
          v = p.values[idx];
        } else {
          const double t0 = p.times[idx], t1 = p.times[idx + 1];
          v = p.values[idx] + (time - t0) / (t1 - t0) * (p.values[idx + 1] - p.values[idx]);
        }
        rows[i * len + t] = v;
      }
    });
    return rows;
  };
  const auto ra = resample(a);
  const auto rb = resample(b);
  parallel_for(a.size(), [&](std::size_t i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      out[i * b.size() + j] = detail::max_abs_diff(&ra[i * len], &rb[j * len], len);
    }
  });
  return out;
}

namespace detail {

inline DistanceEstimate transport_distance(const EmpiricalMeasure& mu_in, const EmpiricalMeasure& nu_in,
                                           DistanceKind kind) {
  mu_in.validate();
  nu_in.validate();
  const auto mu = deduplicate(mu_in);
  const auto nu = deduplicate(nu_in);
  if (mu.paths.size() + nu.paths.size() > kDistanceAtomCap) {
    fail(ErrorCode::SizeCap, "distance: combined support " +
                                 std::to_string(mu.paths.size() + nu.paths.size()) + " exceeds " +
                                 std::to_string(kDistanceAtomCap) + " atoms");
  }
  auto cost = supnorm_matrix(mu.paths, nu.paths);
  if (kind == DistanceKind::fm) {
    for (auto& c : cost) c = std::min(c, 2.0);
  }
  constexpr std::int64_t kMassScale = std::int64_t{1} << 50;
  const auto supply = integer_masses(mu.weights, kMassScale);
  const auto demand = integer_masses(nu.weights, kMassScale);
  TransportSimplex simplex(supply, demand, cost);
  DistanceEstimate out;
  out.value = std::max(0.0, simplex.solve() / static_cast<double>(kMassScale));
  out.kind = kind;
  out.solver_status = SolverStatus::optimal;
  out.m = mu.paths.size();
  out.k = nu.paths.size();
  return out;
}

}  // namespace detail

/// Fortet-Mourier (bounded Lipschitz) distance between two finite path
/// measures under the sup-norm:
///   sup { int F dmu - int F dnu : |F| <= 1, |F(x) - F(y)| <= |x - y|_inf }.
/// The admissible F are, up to an additive constant that cancels between two
/// probability measures, exactly the 1-Lipschitz functions for the truncated
/// metric min(|x - y|_inf, 2); by Kantorovich duality the value is the
/// optimal transport cost under that metric, solved exactly.
inline DistanceEstimate fm_empirical(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  return detail::transport_distance(mu, nu, DistanceKind::fm);
}

/// Wasserstein-1 distance under the sup-norm (no truncation).
inline DistanceEstimate w1_empirical(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  return detail::transport_distance(mu, nu, DistanceKind::w1);
}

using PathSampler = std::function<PathSample(RngStream&)>;

inline std::vector<PathSample> draw_paths(const PathSampler& sampler, std::size_t count, const RngStream& rng) {
  std::vector<PathSample> out(count);
  parallel_for(count, [&](std::size_t i) {
    RngStream sub = rng.substream(i);
    out[i] = sampler(sub);
  });
  return out;
}

/// FM between an m-draw from mu_sampler and a k-draw from nu_sampler, with a
/// 95% half-width from `reps` independent redraws (the reported value is
/// the first of them).
inline DistanceEstimate fm_bootstrap(const PathSampler& mu_sampler, const PathSampler& nu_sampler,
                                     std::size_t m, std::size_t k, std::size_t reps, const RngStream& rng) {
  require(reps >= 20, "fm_bootstrap: reps must be >= 20");
  require(m >= 1 && k >= 1, "fm_bootstrap: empty sample");
  std::vector<double> values(reps);
  DistanceEstimate first;
  for (std::size_t r = 0; r < reps; ++r) {
    const RngStream rep = rng.substream(r);
    auto mu = EmpiricalMeasure::uniform(draw_paths(mu_sampler, m, rep.substream(0)));
    auto nu = EmpiricalMeasure::uniform(draw_paths(nu_sampler, k, rep.substream(1)));
    const auto est = fm_empirical(mu, nu);
    values[r] = est.value;
    if (r == 0) first = est;
  }
  CompensatedSum sum;
  for (double v : values) sum += v;
  const double mean = sum.value() / static_cast<double>(reps);
  CompensatedSum sq;
  for (double v : values) sq += (v - mean) * (v - mean);
  first.half_width = 1.96 * std::sqrt(sq.value() / static_cast<double>(reps - 1));
  first.m = m;
  first.k = k;
  return first;
}

}  // namespace bridge_rate
