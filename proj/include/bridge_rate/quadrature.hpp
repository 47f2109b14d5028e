#pragma once

#include <cmath>
#include <string>

#include "bridge_rate/error.hpp"

namespace bridge_rate {

struct QuadratureSpec {
  double abs_tol = 1e-8;
  int max_depth = 40;
  /// Levels always bisected before the error test may accept, so that
  /// integrands vanishing at the first five nodes are still resolved.
  int min_depth = 4;

  void validate() const {
    require(abs_tol > 0.0, "quadrature: abs_tol must be > 0");
    require(max_depth >= 1 && max_depth <= 60, "quadrature: max_depth must lie in [1,60]");
    require(min_depth >= 0 && min_depth <= max_depth, "quadrature: min_depth out of range");
  }
};

namespace detail {

template <class F>
struct SimpsonRecursion {
  const F& f;
  const QuadratureSpec& spec;
  bool failed = false;

  double run(double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth >= spec.min_depth && std::fabs(delta) <= 15.0 * tol) {
      return left + right + delta / 15.0;
    }
    if (depth >= spec.max_depth) {
      failed = true;
      return left + right + delta / 15.0;
    }
    return run(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           run(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
  }
};

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance
/// spec.abs_tol. Throws QuadratureFailure if some panel still misses its
/// share of the tolerance at spec.max_depth.
template <class F>
double adaptive_simpson(const F& f, double a, double b, const QuadratureSpec& spec = {}) {
  spec.validate();
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  detail::SimpsonRecursion<F> rec{f, spec};
  const double result = rec.run(a, b, fa, fm, fb, whole, spec.abs_tol, 0);
  if (rec.failed) {
    fail(ErrorCode::QuadratureFailure,
         "adaptive Simpson did not reach abs_tol " + std::to_string(spec.abs_tol) +
             " within depth " + std::to_string(spec.max_depth));
  }
  return result;
}

}  // namespace bridge_rate
