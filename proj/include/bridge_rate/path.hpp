#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "bridge_rate/error.hpp"

namespace bridge_rate {

enum class PathKind {
  walk,
  conditioned_walk,
  brownian_bridge,
  brownian_motion,
  empirical_process,
  imported,
};

inline const char* path_kind_name(PathKind kind) {
  switch (kind) {
    case PathKind::walk: return "walk";
    case PathKind::conditioned_walk: return "conditioned_walk";
    case PathKind::brownian_bridge: return "brownian_bridge";
    case PathKind::brownian_motion: return "brownian_motion";
    case PathKind::empirical_process: return "empirical_process";
    case PathKind::imported: return "imported";
  }
  return "unknown";
}

/// A continuous piecewise-linear path on [0, 1], stored by its knots.
///
/// Samplers produce knots at k / grid_n. restrict() at a time strictly
/// between grid points adds that time as an extra knot, so the frozen path
/// is represented exactly rather than smeared over the next grid cell.
struct PathSample {
  std::int64_t grid_n = 1;
  std::vector<double> times;
  std::vector<double> values;
  PathKind kind = PathKind::imported;

  static PathSample on_grid(std::vector<double> values, PathKind kind) {
    require(values.size() >= 2, "path needs at least two grid values");
    PathSample p;
    p.grid_n = static_cast<std::int64_t>(values.size()) - 1;
    p.times.resize(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) {
      p.times[k] = static_cast<double>(k) / static_cast<double>(p.grid_n);
    }
    p.values = std::move(values);
    p.kind = kind;
    return p;
  }

  /// Linear interpolant at time t (clamped to [0, 1]).
  double at(double t) const {
    if (t <= times.front()) return values.front();
    if (t >= times.back()) return values.back();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const auto i = static_cast<std::size_t>(it - times.begin());
    const double t0 = times[i - 1], t1 = times[i];
    const double w = (t - t0) / (t1 - t0);
    return values[i - 1] + w * (values[i] - values[i - 1]);
  }

  /// True when the knots are exactly k / grid_n, k = 0..grid_n.
  bool is_uniform_grid() const {
    if (static_cast<std::int64_t>(times.size()) != grid_n + 1) return false;
    for (std::size_t k = 0; k < times.size(); ++k) {
      if (times[k] != static_cast<double>(k) / static_cast<double>(grid_n)) return false;
    }
    return true;
  }
};

/// sup_t |p(t)| (attained at a knot).
inline double supnorm(const PathSample& p) {
  double m = 0.0;
  for (double v : p.values) m = std::max(m, std::fabs(v));
  return m;
}

/// Exact sup-norm of p - q. Both are linear between consecutive points of
/// the merged knot set, so the maximum is attained on it.
inline double path_supnorm(const PathSample& p, const PathSample& q) {
  std::size_t i = 0, j = 0;
  double best = 0.0;
  auto interp = [](const PathSample& path, std::size_t idx, double t) {
    // idx is the first knot with time >= t
    if (path.times[idx] == t || idx == 0) return path.values[idx];
    const double t0 = path.times[idx - 1], t1 = path.times[idx];
    return path.values[idx - 1] + (t - t0) / (t1 - t0) * (path.values[idx] - path.values[idx - 1]);
  };
  while (i < p.times.size() || j < q.times.size()) {
    double t;
    if (j >= q.times.size() || (i < p.times.size() && p.times[i] <= q.times[j])) {
      t = p.times[i];
    } else {
      t = q.times[j];
    }
    const std::size_t qi = std::min(j, q.times.size() - 1);
    const std::size_t pi = std::min(i, p.times.size() - 1);
    const double a = i < p.times.size() ? interp(p, pi, t) : p.values.back();
    const double b = j < q.times.size() ? interp(q, qi, t) : q.values.back();
    best = std::max(best, std::fabs(a - b));
    if (i < p.times.size() && p.times[i] == t) ++i;
    if (j < q.times.size() && q.times[j] == t) ++j;
  }
  return best;
}

/// f_{|t}: equal to f before t and frozen at f(t) afterwards.
inline PathSample restrict(const PathSample& p, double t) {
  require(t >= 0.0 && t <= 1.0, "restrict: t must lie in [0,1]");
  const double frozen = p.at(t);
  PathSample out;
  out.grid_n = p.grid_n;
  out.kind = p.kind;
  out.times.reserve(p.times.size() + 1);
  out.values.reserve(p.times.size() + 1);
  bool placed = false;
  for (std::size_t k = 0; k < p.times.size(); ++k) {
    const double tk = p.times[k];
    if (tk < t && std::fabs(tk - t) > 1e-14) {
      out.times.push_back(tk);
      out.values.push_back(p.values[k]);
      continue;
    }
    if (!placed && std::fabs(tk - t) > 1e-14) {
      out.times.push_back(t);
      out.values.push_back(frozen);
    }
    placed = true;
    out.times.push_back(tk);
    out.values.push_back(frozen);
  }
  return out;
}

/// Exact integral of |f| over [0, 1].
inline double integral_abs(const PathSample& p) {
  double total = 0.0;
  for (std::size_t k = 1; k < p.times.size(); ++k) {
    const double len = p.times[k] - p.times[k - 1];
    const double a = p.values[k - 1], b = p.values[k];
    if ((a >= 0.0 && b >= 0.0) || (a <= 0.0 && b <= 0.0)) {
      total += 0.5 * len * (std::fabs(a) + std::fabs(b));
    } else {
      total += 0.5 * len * (a * a + b * b) / (std::fabs(a) + std::fabs(b));
    }
  }
  return total;
}

}  // namespace bridge_rate
