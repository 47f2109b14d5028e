#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bridge_rate/error.hpp"
#include "bridge_rate/numeric.hpp"

namespace bridge_rate {

enum class LawFamily { rademacher, poisson_minus_one, custom };

/// One support point: value = offset + span * index.
struct Atom {
  double value;
  double prob;
  std::int64_t index;
};

/// Finite-support increment law living on offset + span * Z, with span maximal
/// and offset reduced into [0, span). Immutable after construction.
class LatticeLaw {
 public:
  /// Builds a law from (value, prob) pairs. Zero-probability atoms are
  /// dropped, duplicate values merged, and the lattice (offset, span) is
  /// recovered from the values.
  static LatticeLaw from_atoms(std::string name,
                               std::vector<std::pair<double, double>> atoms,
                               LawFamily family = LawFamily::custom,
                               double truncated_tail = 0.0);

  const std::string& name() const { return name_; }
  LawFamily family() const { return family_; }
  double offset() const { return offset_; }
  double span() const { return span_; }
  std::span<const Atom> atoms() const { return atoms_; }
  std::int64_t min_index() const { return atoms_.front().index; }
  std::int64_t max_index() const { return atoms_.back().index; }
  double mean() const { return mean_; }
  double variance() const { return variance_; }
  /// Probability mass discarded by truncation before renormalizing.
  double truncated_tail() const { return truncated_tail_; }

  /// Mean 0 and variance 1, the standing assumption of the rate results.
  bool is_standardized(double tol = 1e-10) const {
    return std::fabs(mean_) <= tol && std::fabs(variance_ - 1.0) <= tol;
  }

  /// Value of a sum of `steps` increments whose indices add up to `index_sum`.
  double sum_value(std::int64_t steps, std::int64_t index_sum) const {
    return static_cast<double>(steps) * offset_ + span_ * static_cast<double>(index_sum);
  }

 private:
  LatticeLaw() = default;

  std::string name_;
  LawFamily family_ = LawFamily::custom;
  double offset_ = 0.0;
  double span_ = 1.0;
  std::vector<Atom> atoms_;
  double mean_ = 0.0;
  double variance_ = 0.0;
  double truncated_tail_ = 0.0;
};

namespace detail {

// Greatest common divisor of two positive reals that are (to within tol)
// integer multiples of a common span.
inline double real_gcd(double a, double b, double tol) {
  while (b > tol) {
    const double r = std::fabs(a - b * std::round(a / b));
    a = b;
    b = r;
  }
  return a;
}

}  // namespace detail

inline LatticeLaw LatticeLaw::from_atoms(std::string name,
                                         std::vector<std::pair<double, double>> atoms,
                                         LawFamily family, double truncated_tail) {
  std::vector<std::pair<double, double>> kept;
  CompensatedSum total;
  for (const auto& [v, p] : atoms) {
    require(std::isfinite(v) && std::isfinite(p), "law '" + name + "': non-finite atom");
    require(p >= 0.0, "law '" + name + "': negative probability");
    total += p;
    if (p > 0.0) kept.emplace_back(v, p);
  }
  require(std::fabs(total.value() - 1.0) <= 1e-12,
          "law '" + name + "': probabilities do not sum to 1");
  std::sort(kept.begin(), kept.end());
  std::vector<std::pair<double, double>> merged;
  for (const auto& a : kept) {
    if (!merged.empty() && std::fabs(merged.back().first - a.first) <= 1e-12) {
      merged.back().second += a.second;
    } else {
      merged.push_back(a);
    }
  }
  require(merged.size() >= 2, "law '" + name + "': needs at least two support points");

  const double scale = std::max(std::fabs(merged.front().first), std::fabs(merged.back().first));
  const double tol = 1e-9 * std::max(1.0, scale);
  double span = merged[1].first - merged[0].first;
  for (std::size_t i = 2; i < merged.size(); ++i) {
    span = detail::real_gcd(span, merged[i].first - merged[0].first, tol);
  }
  // Re-derive the span from the widest gap to limit accumulated rounding.
  const double width = merged.back().first - merged.front().first;
  // a spread this wide means the gcd collapsed onto rounding noise
  require(width / span <= 1e6, "law '" + name + "': atoms do not lie on a common lattice");
  span = width / std::round(width / span);

  LatticeLaw law;
  law.name_ = std::move(name);
  law.family_ = family;
  law.truncated_tail_ = truncated_tail;
  law.span_ = span;
  law.offset_ = merged.front().first - span * std::floor(merged.front().first / span);
  if (law.offset_ >= span - 1e-12 * std::max(1.0, span)) law.offset_ = 0.0;
  if (std::fabs(law.offset_) <= 1e-12) law.offset_ = 0.0;

  CompensatedSum mean, second;
  for (const auto& [v, p] : merged) {
    const double k = (v - law.offset_) / span;
    const auto index = static_cast<std::int64_t>(std::llround(k));
    require(std::fabs(law.offset_ + span * static_cast<double>(index) - v) <= 1e-12 * std::max(1.0, std::fabs(v)),
            "law '" + law.name_ + "': atom " + std::to_string(v) + " is off the lattice");
    law.atoms_.push_back({v, p, index});
    mean += p * v;
    second += p * v * v;
  }
  law.mean_ = mean.value();
  law.variance_ = second.value() - law.mean_ * law.mean_;
  return law;
}

/// P(X = 1) = P(X = -1) = 1/2.
inline LatticeLaw make_rademacher() {
  return LatticeLaw::from_atoms("rademacher", {{-1.0, 0.5}, {1.0, 0.5}}, LawFamily::rademacher);
}

/// X = P - 1 with P ~ Poisson(1), truncated to P <= truncation_k and
/// renormalized.
inline LatticeLaw make_poisson_minus_one(int truncation_k = 30) {
  if (truncation_k < 20) {
    fail(ErrorCode::InvalidArgument,
         "poisson-1 truncation K=" + std::to_string(truncation_k) + " < 20");
  }
  std::vector<double> probs;
  double p = std::exp(-1.0);
  CompensatedSum kept;
  for (int k = 0; k <= truncation_k; ++k) {
    if (k > 0) p /= k;
    probs.push_back(p);
    kept += p;
  }
  double tail = 0.0;
  for (int k = truncation_k + 1; k < truncation_k + 40; ++k) {
    p /= k;
    tail += p;
  }
  const double z = kept.value();
  std::vector<std::pair<double, double>> atoms;
  for (int k = 0; k <= truncation_k; ++k) atoms.emplace_back(k - 1.0, probs[k] / z);
  return LatticeLaw::from_atoms("poisson1", std::move(atoms), LawFamily::poisson_minus_one, tail);
}

/// Characteristic function E[exp(i u X)].
inline std::complex<double> char_fn(const LatticeLaw& law, double u) {
  CompensatedSum re, im;
  for (const auto& a : law.atoms()) {
    re += a.prob * std::cos(u * a.value);
    im += a.prob * std::sin(u * a.value);
  }
  return {re.value(), im.value()};
}

/// The lattice anchor + step * Z carrying the rescaled partial sum at time t.
struct LatticeDescriptor {
  double anchor;
  double step;

  bool contains(double x, double tol = 1e-12) const {
    const double z = (x - anchor) / step;
    return std::fabs(z - std::round(z)) * step <= tol * std::max(1.0, std::fabs(x));
  }
};

inline LatticeDescriptor support_set(const LatticeLaw& law, std::int64_t n, double t) {
  require(n >= 1, "support_set: n must be >= 1");
  require(t >= 0.0 && t <= 1.0, "support_set: t must lie in [0,1]");
  const double root_n = std::sqrt(static_cast<double>(n));
  const auto steps = lattice_floor(static_cast<double>(n) * t);
  return {static_cast<double>(steps) * law.offset() / root_n, law.span() / root_n};
}

/// Distribution of a sum of i.i.d. increments, indexed by the sum of lattice
/// indices: P(sum of indices = first + i) = probs[i].
struct IntPmf {
  std::int64_t first = 0;
  std::vector<double> probs{1.0};

  std::int64_t last() const { return first + static_cast<std::int64_t>(probs.size()) - 1; }

  double at(std::int64_t z) const {
    if (z < first || z > last()) return 0.0;
    return probs[static_cast<std::size_t>(z - first)];
  }
};

/// Direct convolution with one more increment. Entries that underflow to
/// exactly zero at either end are trimmed.
inline IntPmf convolve_step(const IntPmf& cur, const LatticeLaw& law) {
  const auto atoms = law.atoms();
  const std::int64_t lo = cur.first + law.min_index();
  const std::int64_t hi = cur.last() + law.max_index();
  IntPmf out;
  out.first = lo;
  out.probs.assign(static_cast<std::size_t>(hi - lo + 1), 0.0);
  for (std::int64_t z = lo; z <= hi; ++z) {
    CompensatedSum acc;
    for (const auto& a : atoms) {
      const double q = cur.at(z - a.index);
      if (q != 0.0) acc += a.prob * q;
    }
    out.probs[static_cast<std::size_t>(z - lo)] = acc.value();
  }
  std::size_t head = 0;
  while (head + 1 < out.probs.size() && out.probs[head] == 0.0) ++head;
  std::size_t tail = out.probs.size();
  while (tail > head + 1 && out.probs[tail - 1] == 0.0) --tail;
  if (head > 0 || tail < out.probs.size()) {
    out.probs = std::vector<double>(out.probs.begin() + static_cast<std::ptrdiff_t>(head),
                                    out.probs.begin() + static_cast<std::ptrdiff_t>(tail));
    out.first += static_cast<std::int64_t>(head);
  }
  return out;
}

inline constexpr std::size_t kDefaultSizeCap = 2'000'000;

inline void check_size_cap(const LatticeLaw& law, std::int64_t steps, std::size_t cap) {
  const double support = static_cast<double>(steps) *
                             static_cast<double>(law.max_index() - law.min_index()) + 1.0;
  if (support > static_cast<double>(cap)) {
    fail(ErrorCode::SizeCap, "sum of " + std::to_string(steps) + " increments of '" + law.name() +
                                 "' needs " + std::to_string(static_cast<long long>(support)) +
                                 " support points (cap " + std::to_string(cap) + ")");
  }
}

/// Exact pmf of the sum of `steps` increments, by iterated convolution.
inline IntPmf sum_pmf(const LatticeLaw& law, std::int64_t steps, std::size_t cap = kDefaultSizeCap) {
  require(steps >= 0, "sum_pmf: negative step count");
  check_size_cap(law, steps, cap);
  IntPmf pmf;
  for (std::int64_t j = 0; j < steps; ++j) pmf = convolve_step(pmf, law);
  return pmf;
}

/// Index sum that a `steps`-step walk must reach to end exactly at 0, if any.
inline bool zero_index_target(const LatticeLaw& law, std::int64_t steps, std::int64_t& target) {
  const double z = -static_cast<double>(steps) * law.offset() / law.span();
  const double r = std::round(z);
  if (std::fabs(z - r) > 1e-9 * std::max(1.0, std::fabs(z))) return false;
  target = static_cast<std::int64_t>(r);
  return true;
}

/// kappa(L): the least k <= n_max such that a k*n-step walk can sit at 0 for
/// every n. Certified by the n-uniform lattice condition k*offset in span*Z
/// together with positivity of P(S_{kn} = 0) for n = 1..probe_n.
inline int kappa(const LatticeLaw& law, int n_max = 16, int probe_n = 8) {
  require(n_max >= 1 && probe_n >= 1, "kappa: n_max and probe_n must be >= 1");
  std::vector<IntPmf> sums{IntPmf{}};
  for (int k = 1; k <= n_max; ++k) {
    std::int64_t target = 0;
    if (!zero_index_target(law, k, target)) continue;
    bool ok = true;
    for (int n = 1; n <= probe_n && ok; ++n) {
      const std::int64_t steps = static_cast<std::int64_t>(k) * n;
      while (static_cast<std::int64_t>(sums.size()) <= steps) {
        check_size_cap(law, static_cast<std::int64_t>(sums.size()), kDefaultSizeCap);
        sums.push_back(convolve_step(sums.back(), law));
      }
      zero_index_target(law, steps, target);
      ok = sums[static_cast<std::size_t>(steps)].at(target) > 0.0;
    }
    if (ok) return k;
  }
  fail(ErrorCode::NotFound, "kappa: no k <= " + std::to_string(n_max) + " for law '" + law.name() + "'");
}

}  // namespace bridge_rate
