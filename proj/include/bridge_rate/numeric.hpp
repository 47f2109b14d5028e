#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace bridge_rate {

/// Neumaier (improved Kahan) running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

namespace detail {
// Products like n*t with t = 0.3 land a few ulps off an integer; snap those
// back so that floor/ceil see the intended lattice index.
inline double snap_to_integer(double x) {
  const double r = std::round(x);
  return std::fabs(x - r) <= 1e-9 * std::fmax(1.0, std::fabs(x)) ? r : x;
}
}  // namespace detail

inline std::int64_t lattice_floor(double x) {
  return static_cast<std::int64_t>(std::floor(detail::snap_to_integer(x)));
}

inline std::int64_t lattice_ceil(double x) {
  return static_cast<std::int64_t>(std::ceil(detail::snap_to_integer(x)));
}

/// Remainder of Stirling's formula: log(x!) - (x log x - x + log(2 pi x)/2).
inline double stirling_remainder(double x) {
  if (x < 10.0) {
    return std::lgamma(x + 1.0) -
           (x * std::log(x) - x + 0.5 * std::log(2.0 * std::numbers::pi * x));
  }
  const double r = 1.0 / x;
  const double r2 = r * r;
  // Asymptotic series; truncation error below 1e-17 for x >= 10.
  return r * (1.0 / 12.0 +
              r2 * (-1.0 / 360.0 +
                    r2 * (1.0 / 1260.0 +
                          r2 * (-1.0 / 1680.0 +
                                r2 * (1.0 / 1188.0 +
                                      r2 * (-691.0 / 360360.0 +
                                            r2 * (1.0 / 156.0)))))));
}

/// Centered Gaussian density with variance t.
inline double gaussian_pdf(double t, double x) {
  return std::exp(-x * x / (2.0 * t)) / std::sqrt(2.0 * std::numbers::pi * t);
}

}  // namespace bridge_rate
