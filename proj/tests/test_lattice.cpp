#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "bridge_rate/lattice_law.hpp"
#include "bridge_rate/walk_pmf.hpp"
#include "oracles.hpp"

using namespace bridge_rate;

namespace {
const double kE1 = std::exp(-1.0);
const double kP1 = 1.0 / std::sqrt(2.0 * std::numbers::pi);
}  // namespace

TEST(LatticeLaw, Rademacher) {
  const auto law = make_rademacher();
  EXPECT_DOUBLE_EQ(law.span(), 2.0);
  EXPECT_DOUBLE_EQ(law.offset(), 1.0);
  EXPECT_NEAR(law.mean(), 0.0, 1e-15);
  EXPECT_NEAR(law.variance(), 1.0, 1e-15);
  EXPECT_TRUE(law.is_standardized());
}

TEST(LatticeLaw, PoissonMinusOne) {
  const auto law = make_poisson_minus_one(30);
  EXPECT_DOUBLE_EQ(law.span(), 1.0);
  EXPECT_NEAR(law.atoms().front().value, -1.0, 0.0);
  EXPECT_NEAR(law.atoms().front().prob, 0.3678794412, 1e-10);
  EXPECT_NEAR(law.mean(), oracle::truncated_poisson_mean_minus_one(30), 1e-15);
  EXPECT_NEAR(law.mean(), 0.0, 1e-12);
  EXPECT_TRUE(law.is_standardized());
  EXPECT_GT(law.truncated_tail(), 0.0);
  EXPECT_LT(law.truncated_tail(), 1e-30);
  EXPECT_THROW(make_poisson_minus_one(10), Error);
}

TEST(LatticeLaw, RecoversMaximalSpan) {
  const auto law = LatticeLaw::from_atoms("three", {{-3.0, 0.5}, {3.0, 0.25}, {9.0, 0.25}});
  EXPECT_DOUBLE_EQ(law.span(), 6.0);
  EXPECT_DOUBLE_EQ(law.offset(), 3.0);
  for (const auto& a : law.atoms()) {
    const double z = (a.value - law.offset()) / law.span();
    EXPECT_NEAR(z, std::round(z), 1e-12);
  }
}

TEST(LatticeLaw, RejectsBadInput) {
  EXPECT_THROW(LatticeLaw::from_atoms("neg", {{0.0, -0.5}, {1.0, 1.5}}), Error);
  EXPECT_THROW(LatticeLaw::from_atoms("sum", {{0.0, 0.5}, {1.0, 0.4}}), Error);
  EXPECT_THROW(LatticeLaw::from_atoms("irr", {{0.0, 0.25}, {1.0, 0.5}, {std::sqrt(2.0), 0.25}}), Error);
}

TEST(CharFn, Examples) {
  const auto rad = make_rademacher();
  const auto c0 = char_fn(rad, 0.0);
  EXPECT_NEAR(c0.real(), 1.0, 1e-15);
  EXPECT_NEAR(c0.imag(), 0.0, 1e-15);
  const auto cpi = char_fn(rad, std::numbers::pi);
  EXPECT_NEAR(cpi.real(), -1.0, 1e-15);
  EXPECT_NEAR(cpi.imag(), 0.0, 1e-15);

  const auto poi = make_poisson_minus_one();
  const auto c1 = char_fn(poi, 1.0);
  const std::complex<double> closed = std::exp(std::exp(std::complex<double>(0, 1)) - std::complex<double>(0, 1) - 1.0);
  EXPECT_NEAR(c1.real(), closed.real(), 1e-14);
  EXPECT_NEAR(c1.imag(), closed.imag(), 1e-14);
  // modulus exp(cos 1 - 1), phase sin 1 - 1
  EXPECT_NEAR(std::abs(c1), std::exp(std::cos(1.0) - 1.0), 1e-14);
  EXPECT_NEAR(std::arg(c1), std::sin(1.0) - 1.0, 1e-14);
}

TEST(Kappa, Examples) {
  EXPECT_EQ(kappa(make_rademacher()), 2);
  EXPECT_EQ(kappa(make_poisson_minus_one()), 1);
  EXPECT_EQ(kappa(LatticeLaw::from_atoms("lazy", {{-1.0, 0.25}, {0.0, 0.5}, {1.0, 0.25}})), 1);
  // offset 1, span 3: k must be a multiple of 3
  EXPECT_EQ(kappa(LatticeLaw::from_atoms("skew", {{-2.0, 1.0 / 3.0}, {1.0, 2.0 / 3.0}})), 3);
  // every increment positive: never returns to 0
  try {
    kappa(LatticeLaw::from_atoms("up", {{1.0, 0.5}, {2.0, 0.5}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotFound);
  }
}

TEST(SupportSet, Examples) {
  const auto a = support_set(make_rademacher(), 4, 1.0);
  EXPECT_DOUBLE_EQ(a.anchor, 2.0);
  EXPECT_DOUBLE_EQ(a.step, 1.0);
  for (double v : {-2.0, -1.0, 0.0, 1.0, 2.0}) EXPECT_TRUE(a.contains(v));
  EXPECT_FALSE(a.contains(0.5));
  const auto b = support_set(make_poisson_minus_one(), 9, 1.0);
  EXPECT_DOUBLE_EQ(b.anchor, 0.0);
  EXPECT_NEAR(b.step, 1.0 / 3.0, 1e-16);
  EXPECT_DOUBLE_EQ(support_set(make_rademacher(), 7, 0.0).anchor, 0.0);
}

TEST(ExactPmf, RademacherTwoSteps) {
  const auto p = exact_pmf(make_rademacher(), 2, 1.0);
  EXPECT_NEAR(p.prob_at(0.0), 0.5, 1e-15);
  EXPECT_NEAR(p.prob_at(2.0 / std::sqrt(2.0)), 0.25, 1e-15);
  EXPECT_NEAR(p.prob_at(-2.0 / std::sqrt(2.0)), 0.25, 1e-15);
  EXPECT_EQ(p.prob_at(1.0 / std::sqrt(2.0)), 0.0);
}

TEST(ExactPmf, BinomialOracleAndSupport) {
  const auto law = make_rademacher();
  const int n = 40;
  const auto p = exact_pmf(law, n, 1.0);
  const auto lattice = support_set(law, n, 1.0);
  CompensatedSum total;
  for (std::int64_t z = p.first_index; z <= p.last_index(); ++z) {
    const int ups = static_cast<int>(z - p.first_index);
    const double binom = std::exp(std::lgamma(n + 1.0) - std::lgamma(ups + 1.0) - std::lgamma(n - ups + 1.0) - n * std::log(2.0));
    EXPECT_NEAR(p.prob_index(z), binom, 1e-14);
    EXPECT_TRUE(lattice.contains(p.value(z)));
    total += p.prob_index(z);
  }
  EXPECT_NEAR(total.value(), 1.0, 1e-12);
}

TEST(ExactPmf, TimeZeroIsPointMass) {
  const auto p = exact_pmf(make_poisson_minus_one(), 17, 0.0);
  EXPECT_EQ(p.probs.size(), 1u);
  EXPECT_DOUBLE_EQ(p.prob_at(0.0), 1.0);
}

TEST(ExactPmf, PoissonSingleStep) {
  const auto p = exact_pmf(make_poisson_minus_one(), 1, 1.0);
  EXPECT_NEAR(p.prob_at(-1.0), kE1, 1e-15);
  EXPECT_NEAR(p.prob_at(0.0), kE1, 1e-15);
  EXPECT_NEAR(p.prob_at(2.0), kE1 / 6.0, 1e-15);
}

TEST(ExactPmf, SizeCap) {
  try {
    exact_pmf(make_poisson_minus_one(), 100, 1.0, 1000);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SizeCap);
  }
}

TEST(PmfAtZeroClosed, Examples) {
  EXPECT_NEAR(pmf_at_zero_closed(make_rademacher(), 1), 0.5, 1e-15);
  EXPECT_NEAR(pmf_at_zero_closed(make_poisson_minus_one(), 1), 0.3678794412, 1e-10);
  const double conv = exact_pmf(make_rademacher(), 1000, 1.0).prob_at(0.0);
  const double closed = pmf_at_zero_closed(make_rademacher(), 500);
  EXPECT_NEAR(closed / conv, 1.0, 1e-12);
  const double conv_p = exact_pmf(make_poisson_minus_one(), 200, 1.0).prob_at(0.0);
  EXPECT_NEAR(pmf_at_zero_closed(make_poisson_minus_one(), 200) / conv_p, 1.0, 1e-12);
}

TEST(GaussianDensity, Examples) {
  EXPECT_NEAR(gaussian_density(1.0, 0.0), 0.3989422804, 1e-10);
  EXPECT_NEAR(gaussian_density(0.3, 0.0), 1.0 / std::sqrt(2 * std::numbers::pi * 0.3), 1e-15);
  EXPECT_NEAR(gaussian_density(0.25, 0.5), 0.4839414, 1e-7);
  EXPECT_THROW(gaussian_density(0.0, 1.0), Error);
  EXPECT_NEAR(kP1, gaussian_density(1.0, 0.0), 1e-16);
}
