#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "bridge_rate/error.hpp"
#include "bridge_rate/lattice_law.hpp"
#include "bridge_rate/numeric.hpp"

namespace bridge_rate {

/// Exact law of the rescaled partial sum (1/sqrt(n)) * sum_{i <= floor(n t)} X_i.
/// Entry i of `probs` is the probability of value anchor + (first_index + i) * step.
struct WalkPmf {
  std::int64_t n = 1;
  double t = 0.0;
  std::string law_name;
  double anchor = 0.0;
  double step = 1.0;
  std::int64_t first_index = 0;
  std::vector<double> probs;

  std::int64_t last_index() const {
    return first_index + static_cast<std::int64_t>(probs.size()) - 1;
  }

  double value(std::int64_t z) const { return anchor + static_cast<double>(z) * step; }

  double prob_index(std::int64_t z) const {
    if (z < first_index || z > last_index()) return 0.0;
    return probs[static_cast<std::size_t>(z - first_index)];
  }

  /// P(value = x); zero for x off the lattice.
  double prob_at(double x) const {
    const double z = (x - anchor) / step;
    const double r = std::round(z);
    if (std::fabs(z - r) > 1e-9) return 0.0;
    return prob_index(static_cast<std::int64_t>(r));
  }
};

inline WalkPmf exact_pmf(const LatticeLaw& law, std::int64_t n, double t,
                         std::size_t cap = kDefaultSizeCap) {
  require(n >= 1, "exact_pmf: n must be >= 1");
  require(t >= 0.0 && t <= 1.0, "exact_pmf: t must lie in [0,1]");
  const std::int64_t steps = lattice_floor(static_cast<double>(n) * t);
  IntPmf sum = sum_pmf(law, steps, cap);
  const auto lattice = support_set(law, n, t);
  WalkPmf out;
  out.n = n;
  out.t = t;
  out.law_name = law.name();
  out.anchor = lattice.anchor;
  out.step = lattice.step;
  out.first_index = sum.first;
  out.probs = std::move(sum.probs);
  return out;
}

/// p_t(x), the N(0, t) density.
inline double gaussian_density(double t, double x) {
  if (!(t > 0.0)) fail(ErrorCode::InvalidArgument, "gaussian_density: t must be > 0");
  return gaussian_pdf(t, x);
}

/// log of (sqrt(kappa n) / h) p^{kappa n}_1(0) / p_1(0) for the built-in laws,
/// evaluated through Stirling remainders so that values near 0 keep full
/// relative precision.
inline double closed_form_return_log_ratio(const LatticeLaw& law, std::int64_t n) {
  require(n >= 1, "closed form: n must be >= 1");
  const double x = static_cast<double>(n);
  switch (law.family()) {
    case LawFamily::rademacher:
      // C(2n,n)/4^n = exp(R(2n) - 2R(n)) / sqrt(pi n)
      return stirling_remainder(2.0 * x) - 2.0 * stirling_remainder(x);
    case LawFamily::poisson_minus_one:
      // n^n e^{-n} / n! = exp(-R(n)) / sqrt(2 pi n)
      return -stirling_remainder(x);
    case LawFamily::custom:
      break;
  }
  fail(ErrorCode::Unsupported, "no closed form for law '" + law.name() + "'");
}

/// p^{kappa n}_1(0): C(2n,n)/2^{2n} for Rademacher, n^n e^{-n}/n! for
/// Poisson-minus-one.
inline double pmf_at_zero_closed(const LatticeLaw& law, std::int64_t n) {
  require(n >= 1, "pmf_at_zero_closed: n must be >= 1");
  if (law.family() == LawFamily::custom) {
    fail(ErrorCode::Unsupported, "no closed form for law '" + law.name() + "'");
  }
  if (n <= 30) {
    double p = 1.0;
    if (law.family() == LawFamily::rademacher) {
      for (std::int64_t k = 1; k <= n; ++k) p *= static_cast<double>(n + k) / (4.0 * static_cast<double>(k));
    } else {
      const double x = static_cast<double>(n);
      for (std::int64_t k = 1; k <= n; ++k) p *= x / (static_cast<double>(k) * std::numbers::e);
    }
    return p;
  }
  const double x = static_cast<double>(n);
  const double base = law.family() == LawFamily::rademacher ? std::sqrt(std::numbers::pi * x)
                                                            : std::sqrt(2.0 * std::numbers::pi * x);
  return std::exp(closed_form_return_log_ratio(law, n)) / base;
}

}  // namespace bridge_rate
