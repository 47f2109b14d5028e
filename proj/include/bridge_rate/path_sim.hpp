#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "bridge_rate/error.hpp"
#include "bridge_rate/lattice_law.hpp"
#include "bridge_rate/path.hpp"
#include "bridge_rate/rng.hpp"

namespace bridge_rate {

/// Path of the interpolated walk with grid `steps` built from lattice
/// indices of its increments, scaled by 1/sqrt(scale_n).
inline PathSample path_from_indices(const LatticeLaw& law, std::span<const std::int64_t> indices,
                                    std::int64_t scale_n, PathKind kind) {
  const double inv_root = 1.0 / std::sqrt(static_cast<double>(scale_n));
  std::vector<double> values(indices.size() + 1, 0.0);
  std::int64_t running = 0;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    running += indices[k];
    values[k + 1] = law.sum_value(static_cast<std::int64_t>(k + 1), running) * inv_root;
  }
  return PathSample::on_grid(std::move(values), kind);
}

/// Inverse-CDF sampler over the atoms of a law.
class AtomSampler {
 public:
  explicit AtomSampler(const LatticeLaw& law) : law_(&law) {
    double c = 0.0;
    for (const auto& a : law.atoms()) {
      c += a.prob;
      cdf_.push_back(c);
    }
    cdf_.back() = 1.0;
  }

  std::int64_t draw_index(RngStream& rng) const {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
    return law_->atoms()[k].index;
  }

 private:
  const LatticeLaw* law_;
  std::vector<double> cdf_;
};

inline std::vector<std::int64_t> sample_walk_indices(const LatticeLaw& law, std::int64_t steps,
                                                     RngStream& rng) {
  AtomSampler sampler(law);
  std::vector<std::int64_t> idx(static_cast<std::size_t>(steps));
  for (auto& k : idx) k = sampler.draw_index(rng);
  return idx;
}

/// n i.i.d. increments, cumulative sums scaled by 1/sqrt(n), grid n.
inline PathSample sample_walk_path(const LatticeLaw& law, std::int64_t n, RngStream& rng) {
  require(n >= 1, "sample_walk_path: n must be >= 1");
  const auto idx = sample_walk_indices(law, n, rng);
  return path_from_indices(law, idx, n, PathKind::walk);
}

/// Exact sampler of the kappa n step walk conditioned to end at 0.
///
/// Increments are drawn one at a time from the Doob h-transform: with index
/// sum sigma after k steps, atom a is chosen with probability proportional to
/// p_a * q_{m-k-1}(target - sigma - a), where q_j is the exact j-step index
/// pmf. The tables q_0..q_m are built once per sampler.
class ConditionedSampler {
 public:
  ConditionedSampler(const LatticeLaw& law, std::int64_t n, std::size_t cap = kDefaultSizeCap)
      : law_(&law), n_(n) {
    require(n >= 1, "conditioned sampler: n must be >= 1");
    steps_ = kappa(law) * n;
    check_size_cap(law, steps_, cap);
    if (!zero_index_target(law, steps_, target_)) {
      fail(ErrorCode::InternalError, "conditioned sampler: 0 is off the lattice");
    }
    tables_.reserve(static_cast<std::size_t>(steps_ + 1));
    tables_.emplace_back();
    for (std::int64_t j = 1; j <= steps_; ++j) tables_.push_back(convolve_step(tables_.back(), law));
    if (!(tables_.back().at(target_) > 0.0)) {
      fail(ErrorCode::InternalError, "conditioned sampler: P(S_{kappa n}(1) = 0) = 0");
    }
  }

  std::int64_t n() const { return n_; }
  std::int64_t steps() const { return steps_; }
  const LatticeLaw& law() const { return *law_; }
  /// P(sum of m increments has index sum z).
  const IntPmf& sum_table(std::int64_t steps) const { return tables_.at(static_cast<std::size_t>(steps)); }
  std::int64_t zero_target() const { return target_; }

  std::vector<std::int64_t> sample_indices(RngStream& rng) const {
    const auto atoms = law_->atoms();
    std::vector<double> weights(atoms.size());
    std::vector<std::int64_t> out(static_cast<std::size_t>(steps_));
    std::int64_t sigma = 0;
    for (std::int64_t k = 0; k < steps_; ++k) {
      const IntPmf& rest = tables_[static_cast<std::size_t>(steps_ - k - 1)];
      double total = 0.0;
      for (std::size_t a = 0; a < atoms.size(); ++a) {
        weights[a] = atoms[a].prob * rest.at(target_ - sigma - atoms[a].index);
        total += weights[a];
      }
      if (!(total > 0.0)) {
        fail(ErrorCode::InternalError, "conditioned sampler reached a state with zero bridge mass");
      }
      double u = rng.uniform() * total;
      std::size_t pick = atoms.size();
      for (std::size_t a = 0; a < atoms.size(); ++a) {
        if (weights[a] <= 0.0) continue;
        pick = a;
        if (u < weights[a]) break;
        u -= weights[a];
      }
      out[static_cast<std::size_t>(k)] = atoms[pick].index;
      sigma += atoms[pick].index;
    }
    return out;
  }

  PathSample sample(RngStream& rng) const {
    const auto idx = sample_indices(rng);
    auto p = path_from_indices(*law_, idx, steps_, PathKind::conditioned_walk);
    p.values.back() = 0.0;
    return p;
  }

 private:
  const LatticeLaw* law_;
  std::int64_t n_;
  std::int64_t steps_ = 0;
  std::int64_t target_ = 0;
  std::vector<IntPmf> tables_;
};

inline PathSample sample_conditioned_path(const LatticeLaw& law, std::int64_t n, RngStream& rng) {
  return ConditionedSampler(law, n).sample(rng);
}

/// Standard Brownian motion on the grid k / grid_n.
inline PathSample sample_brownian_motion(std::int64_t grid_n, RngStream& rng) {
  require(grid_n >= 1, "brownian motion: grid_n must be >= 1");
  const double sd = 1.0 / std::sqrt(static_cast<double>(grid_n));
  std::vector<double> values(static_cast<std::size_t>(grid_n + 1), 0.0);
  for (std::int64_t k = 1; k <= grid_n; ++k) {
    values[static_cast<std::size_t>(k)] = values[static_cast<std::size_t>(k - 1)] + sd * rng.normal();
  }
  return PathSample::on_grid(std::move(values), PathKind::brownian_motion);
}

/// Brownian bridge as B_t - t B_1 on the grid.
inline PathSample sample_brownian_bridge(std::int64_t grid_n, RngStream& rng) {
  auto p = sample_brownian_motion(grid_n, rng);
  const double end = p.values.back();
  for (std::size_t k = 0; k < p.values.size(); ++k) p.values[k] -= p.times[k] * end;
  p.values.back() = 0.0;
  p.kind = PathKind::brownian_bridge;
  return p;
}

/// sqrt(n) (F_n(k/n) - k/n) for n uniforms, k = 0..n.
inline PathSample sample_empirical_process(std::int64_t n, RngStream& rng) {
  require(n >= 1, "empirical process: n must be >= 1");
  std::vector<std::int64_t> counts(static_cast<std::size_t>(n + 1), 0);
  const double dn = static_cast<double>(n);
  for (std::int64_t i = 0; i < n; ++i) {
    const double u = rng.uniform_open();
    // smallest k with u <= k/n
    auto k = static_cast<std::int64_t>(std::ceil(u * dn));
    if (k > 0 && u <= static_cast<double>(k - 1) / dn) --k;
    if (k < n && u > static_cast<double>(k) / dn) ++k;
    ++counts[static_cast<std::size_t>(k)];
  }
  std::vector<double> values(static_cast<std::size_t>(n + 1), 0.0);
  std::int64_t cum = 0;
  const double inv_root = 1.0 / std::sqrt(dn);
  for (std::int64_t k = 0; k <= n; ++k) {
    cum += counts[static_cast<std::size_t>(k)];
    values[static_cast<std::size_t>(k)] = static_cast<double>(cum - k) * inv_root;
  }
  values.back() = 0.0;
  return PathSample::on_grid(std::move(values), PathKind::empirical_process);
}

}  // namespace bridge_rate
