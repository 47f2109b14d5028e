#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "bridge_rate/error.hpp"
#include "bridge_rate/lattice_law.hpp"
#include "bridge_rate/numeric.hpp"
#include "bridge_rate/quadrature.hpp"
#include "bridge_rate/walk_pmf.hpp"

namespace bridge_rate {

/// z^k by repeated squaring.
inline std::complex<double> complex_pow(std::complex<double> z, std::int64_t k) {
  std::complex<double> result{1.0, 0.0};
  while (k > 0) {
    if (k & 1) result *= z;
    z *= z;
    k >>= 1;
  }
  return result;
}

/// rho(L, n) = n^{1/18} | (sqrt(kappa n)/h) p^{kappa n}_1(0) - p_1(0) |.
inline double rho(const LatticeLaw& law, std::int64_t n, std::size_t cap = kDefaultSizeCap) {
  require(n >= 1, "rho: n must be >= 1");
  const double p1 = gaussian_pdf(1.0, 0.0);
  const double prefactor = std::pow(static_cast<double>(n), 1.0 / 18.0);
  if (law.family() != LawFamily::custom) {
    return prefactor * p1 * std::fabs(std::expm1(closed_form_return_log_ratio(law, n)));
  }
  const int k = kappa(law);
  const std::int64_t m = k * n;
  const auto pmf = exact_pmf(law, m, 1.0, cap);
  const double scaled = std::sqrt(static_cast<double>(m)) / law.span() * pmf.prob_at(0.0);
  return prefactor * std::fabs(scaled - p1);
}

/// tau with an arbitrary characteristic function phi (a test hook; the law
/// overload below is the production entry point). The integrand is even, so
/// the quadrature runs over [0, n^delta] and doubles.
template <class CharFn>
double tau_with(const CharFn& phi, std::int64_t n, double delta, double s,
                const QuadratureSpec& quad = {}) {
  require(n >= 1, "tau: n must be >= 1");
  require(delta > 1.0 / 18.0, "tau: delta must exceed 1/18");
  require(s > 0.0 && s <= 1.0, "tau: s must lie in (0,1]");
  const double root_n = std::sqrt(static_cast<double>(n));
  const std::int64_t power = lattice_floor(static_cast<double>(n) * s);
  const double upper = std::pow(static_cast<double>(n), delta);
  auto integrand = [&](double u) {
    const std::complex<double> walk = complex_pow(phi(u / root_n), power);
    return std::abs(walk - std::exp(-s * u * u / 2.0));
  };
  QuadratureSpec half = quad;
  half.abs_tol = quad.abs_tol / 2.0;
  return 2.0 * adaptive_simpson(integrand, 0.0, upper, half);
}

/// tau(L, n, delta) at an explicit s:
/// int_{-n^delta}^{n^delta} | phi^{floor(ns)}(u/sqrt n) - exp(-s u^2/2) | du.
inline double tau(const LatticeLaw& law, std::int64_t n, double delta, double s,
                  const QuadratureSpec& quad = {}) {
  return tau_with([&law](double u) { return char_fn(law, u); }, n, delta, s, quad);
}

/// {k/16 : 1 <= k <= 16} restricted to [n^{-1/9}, 1].
inline std::vector<double> default_s_grid(std::int64_t n) {
  const double lower = std::pow(static_cast<double>(n), -1.0 / 9.0);
  std::vector<double> grid;
  for (int k = 1; k <= 16; ++k) {
    const double s = k / 16.0;
    if (s >= lower) grid.push_back(s);
  }
  return grid;
}

inline double tau_sup(const LatticeLaw& law, std::int64_t n, double delta,
                      const std::vector<double>& s_grid, const QuadratureSpec& quad = {}) {
  require(!s_grid.empty(), "tau_sup: empty s grid");
  double best = 0.0;
  for (double s : s_grid) best = std::max(best, tau(law, n, delta, s, quad));
  return best;
}

/// sup over the lattice of | (sqrt(n)/h) p^n_s(a) - p_s(a) |. The scan covers
/// the exact support and continues outward until the Gaussian term drops
/// below 1e-16.
inline double local_limit_error(const LatticeLaw& law, std::int64_t n, double s,
                                std::size_t cap = kDefaultSizeCap) {
  require(s > 0.0 && s <= 1.0, "local_limit_error: s must lie in (0,1]");
  const auto pmf = exact_pmf(law, n, s, cap);
  const double scale = std::sqrt(static_cast<double>(n)) / law.span();
  auto term = [&](std::int64_t z) {
    return std::fabs(scale * pmf.prob_index(z) - gaussian_pdf(s, pmf.value(z)));
  };
  double sup = 0.0;
  for (std::int64_t z = pmf.first_index; z <= pmf.last_index(); ++z) sup = std::max(sup, term(z));
  for (std::int64_t z = pmf.first_index - 1; gaussian_pdf(s, pmf.value(z)) >= 1e-16; --z) {
    sup = std::max(sup, term(z));
  }
  for (std::int64_t z = pmf.last_index() + 1; gaussian_pdf(s, pmf.value(z)) >= 1e-16; ++z) {
    sup = std::max(sup, term(z));
  }
  return sup;
}

/// L_t(x) = p_{1-t}(-x) / p_1(0).
inline double weight_L(double t, double x) {
  if (!(t >= 0.0 && t < 1.0)) fail(ErrorCode::InvalidArgument, "weight_L: t must lie in [0,1)");
  return gaussian_pdf(1.0 - t, -x) / gaussian_pdf(1.0, 0.0);
}

/// L^n_t(x) = p^{kappa n}_{1-t}(-x) / p^{kappa n}_1(0), with both pmfs
/// precomputed so the weight can be evaluated many times. Off-lattice
/// arguments have weight 0.
class DiscreteWeight {
 public:
  DiscreteWeight(const LatticeLaw& law, std::int64_t n, double t, std::size_t cap = kDefaultSizeCap)
      : t_(t) {
    if (!(t >= 0.0 && t < 1.0)) fail(ErrorCode::InvalidArgument, "weight_Ln: t must lie in [0,1)");
    require(n >= 1, "weight_Ln: n must be >= 1");
    walk_steps_ = kappa(law) * n;
    remaining_ = exact_pmf(law, walk_steps_, 1.0 - t, cap);
    const auto full = exact_pmf(law, walk_steps_, 1.0, cap);
    return_prob_ = full.prob_at(0.0);
    if (!zero_index_target(law, walk_steps_, zero_target_)) {
      fail(ErrorCode::InternalError, "weight_Ln: 0 is off the lattice of the kappa n step walk");
    }
  }

  std::int64_t walk_steps() const { return walk_steps_; }
  /// Number of increments that determine the frozen path, ceil(kappa n t).
  std::int64_t prefix_steps() const { return lattice_ceil(static_cast<double>(walk_steps_) * t_); }
  double return_probability() const { return return_prob_; }

  double operator()(double x) const { return remaining_.prob_at(-x) / return_prob_; }

  /// Weight for a prefix whose increment indices sum to `index_sum`; the
  /// remaining steps must bring the index sum to the zero target.
  double from_prefix_index(std::int64_t index_sum) const {
    return remaining_.prob_index(zero_target_ - index_sum) / return_prob_;
  }

 private:
  double t_;
  std::int64_t walk_steps_ = 0;
  WalkPmf remaining_;
  double return_prob_ = 0.0;
  std::int64_t zero_target_ = 0;
};

inline double weight_Ln(const LatticeLaw& law, std::int64_t n, double t, double x,
                        std::size_t cap = kDefaultSizeCap) {
  return DiscreteWeight(law, n, t, cap)(x);
}

}  // namespace bridge_rate
