#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "bridge_rate/fm_distance.hpp"
#include "bridge_rate/path.hpp"
#include "bridge_rate/path_sim.hpp"
#include "bridge_rate/rn_weighting.hpp"
#include "oracles.hpp"

using namespace bridge_rate;

namespace {

struct Moments {
  double mean_x, mean_y, cov, cov_se;
};

// Sample covariance of two coordinates with a standard error from the
// spread of the centred products.
Moments covariance(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  std::vector<double> prod(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) prod[i] = (x[i] - mx) * (y[i] - my);
  const auto s = summarize(prod);
  return {mx, my, s.estimate, s.std_error};
}

PathSample knots(std::vector<double> t, std::vector<double> v) {
  PathSample p;
  p.grid_n = static_cast<std::int64_t>(t.size()) - 1;
  p.times = std::move(t);
  p.values = std::move(v);
  return p;
}

}  // namespace

TEST(Restrict, Examples) {
  const auto p = PathSample::on_grid({0.0, 1.0, 2.0}, PathKind::imported);
  const auto r = restrict(p, 0.5);
  EXPECT_EQ(r.values, (std::vector<double>{0.0, 1.0, 1.0}));
  EXPECT_EQ(r.times, p.times);
  const auto id = restrict(p, 1.0);
  EXPECT_EQ(id.values, p.values);
  const auto zero = restrict(p, 0.0);
  for (double v : zero.values) EXPECT_EQ(v, 0.0);
}

TEST(Restrict, OffGridTimeAddsKnot) {
  const auto p = PathSample::on_grid({0.0, 1.0, -1.0, 0.0}, PathKind::imported);
  const auto r = restrict(p, 0.5);
  ASSERT_EQ(r.times.size(), 5u);
  EXPECT_DOUBLE_EQ(r.times[2], 0.5);
  EXPECT_NEAR(r.values[2], 0.0, 1e-15);
  EXPECT_EQ(r.at(0.9), r.values[2]);
  EXPECT_DOUBLE_EQ(r.at(0.25), p.at(0.25));
}

TEST(PathSupnorm, Examples) {
  const auto p = PathSample::on_grid({0.0, 1.0, -0.5, 2.0}, PathKind::imported);
  EXPECT_EQ(path_supnorm(p, p), 0.0);
  const auto zero = PathSample::on_grid({0.0, 0.0, 0.0}, PathKind::imported);
  const auto tent = PathSample::on_grid({0.0, 1.0, 0.0}, PathKind::imported);
  EXPECT_DOUBLE_EQ(path_supnorm(zero, tent), 1.0);
}

TEST(PathSupnorm, MixedGridsAgainstDenseOracle) {
  const auto a = PathSample::on_grid({0.0, 0.7, -0.2}, PathKind::imported);
  const auto b = PathSample::on_grid({0.0, -0.4, 0.9, 0.1}, PathKind::imported);
  // 600000 intervals contain 1/2, 1/3 and 2/3 exactly as grid points
  const double dense = oracle::dense_supnorm(a.times, a.values, b.times, b.values, 600000);
  EXPECT_NEAR(path_supnorm(a, b), dense, 1e-12);
  EXPECT_NEAR(path_supnorm(b, a), dense, 1e-12);
}

TEST(PathSupnorm, RandomKnotsAgainstDenseOracle) {
  RngStream rng(3);
  for (int rep = 0; rep < 5; ++rep) {
    const auto a = sample_brownian_bridge(10, rng);
    const auto b = restrict(sample_brownian_bridge(6, rng), 0.37);
    const double dense = oracle::dense_supnorm(a.times, a.values, b.times, b.values, 300000);
    // dense grid misses the knot at 0.37 by at most 1e-6 in time
    EXPECT_NEAR(path_supnorm(a, b), dense, 1e-4);
    EXPECT_GE(path_supnorm(a, b), dense - 1e-15);
  }
}

TEST(IntegralAbs, SignChangeAndMidpoint) {
  const auto p = knots({0.0, 0.5, 1.0}, {0.0, 1.0, -1.0});
  EXPECT_NEAR(integral_abs(p), 0.25 + 0.25, 1e-15);
  double dense = 0;
  const int m = 1000000;
  for (int i = 0; i < m; ++i) dense += std::fabs(oracle::interp(p.times, p.values, (i + 0.5) / m));
  EXPECT_NEAR(integral_abs(p), dense / m, 1e-9);
}

TEST(WalkSampler, SingleStep) {
  const auto law = make_rademacher();
  const RngStream root(11);
  int ups = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    auto r = root.substream(i);
    const auto p = sample_walk_path(law, 1, r);
    ASSERT_EQ(p.values.size(), 2u);
    ASSERT_EQ(p.values[0], 0.0);
    ASSERT_EQ(std::fabs(p.values[1]), 1.0);
    ups += p.values[1] > 0;
  }
  EXPECT_NEAR(ups / static_cast<double>(n), 0.5, 4 * std::sqrt(0.25 / n));
}

TEST(WalkSampler, EndpointVarianceIsOne) {
  const auto law = make_rademacher();
  const std::size_t seeds = 100000;
  std::vector<double> ends(seeds);
  const RngStream root(5);
  parallel_for(seeds, [&](std::size_t i) {
    auto r = root.substream(i);
    ends[i] = sample_walk_path(law, 10000, r).values.back();
  });
  std::vector<double> sq(seeds);
  for (std::size_t i = 0; i < seeds; ++i) sq[i] = ends[i] * ends[i];
  const auto s = summarize(sq);
  EXPECT_NEAR(s.estimate, 1.0, 3 * s.std_error);
}

TEST(WalkSampler, IncrementsOnLattice) {
  const auto law = make_poisson_minus_one();
  RngStream r(2);
  const auto p = sample_walk_path(law, 50, r);
  EXPECT_EQ(p.values[0], 0.0);
  for (std::size_t k = 1; k < p.values.size(); ++k) {
    const double inc = (p.values[k] - p.values[k - 1]) * std::sqrt(50.0);
    EXPECT_NEAR(inc, std::round(inc), 1e-12);
    EXPECT_GE(std::round(inc), -1.0);
  }
}

TEST(ConditionedSampler, SingleBridgeStep) {
  const auto law = make_rademacher();
  const ConditionedSampler s(law, 1);
  const RngStream root(9);
  int up_first = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    auto r = root.substream(i);
    const auto p = s.sample(r);
    ASSERT_EQ(p.values.size(), 3u);
    ASSERT_EQ(p.values[2], 0.0);
    ASSERT_NEAR(std::fabs(p.values[1]), 1.0 / std::sqrt(2.0), 1e-15);
    up_first += p.values[1] > 0;
  }
  EXPECT_NEAR(up_first / static_cast<double>(n), 0.5, 4 * std::sqrt(0.25 / n));
}

TEST(ConditionedSampler, PathLawMatchesEnumeration) {
  const auto law = make_rademacher();
  const ConditionedSampler s(law, 3);
  const auto bridges = oracle::rademacher_bridges(6);
  ASSERT_EQ(bridges.size(), 20u);
  std::map<std::vector<int>, std::size_t> counts;
  const std::size_t seeds = 1000000;
  std::vector<std::vector<int>> drawn(seeds);
  const RngStream root(21);
  parallel_for(seeds, [&](std::size_t i) {
    auto r = root.substream(i);
    const auto p = s.sample(r);
    std::vector<int> key(p.values.size());
    for (std::size_t k = 0; k < key.size(); ++k) key[k] = static_cast<int>(std::lround(p.values[k] * std::sqrt(6.0)));
    drawn[i] = std::move(key);
  });
  for (const auto& d : drawn) counts[d]++;
  double tv = 0.0;
  for (const auto& b : bridges) tv += std::fabs(counts[b] / static_cast<double>(seeds) - 1.0 / 20.0);
  for (const auto& [k, c] : counts) {
    if (std::find(bridges.begin(), bridges.end(), k) == bridges.end()) tv += c / static_cast<double>(seeds);
  }
  EXPECT_LT(0.5 * tv, 4e-3);
}

TEST(ConditionedSampler, PoissonEndsAtZeroOnLattice) {
  const auto law = make_poisson_minus_one();
  const ConditionedSampler s(law, 40);
  RngStream r(4);
  for (int i = 0; i < 50; ++i) {
    const auto p = s.sample(r);
    EXPECT_EQ(p.values.back(), 0.0);
    EXPECT_EQ(p.kind, PathKind::conditioned_walk);
    for (std::size_t k = 1; k < p.values.size(); ++k) {
      const double inc = (p.values[k] - p.values[k - 1]) * std::sqrt(40.0);
      EXPECT_NEAR(inc, std::round(inc), 1e-12);
    }
  }
}

TEST(BrownianBridge, EndsAtZero) {
  RngStream r(8);
  for (int i = 0; i < 10; ++i) {
    const auto p = sample_brownian_bridge(64, r);
    EXPECT_EQ(p.values.front(), 0.0);
    EXPECT_EQ(p.values.back(), 0.0);
  }
}

TEST(BrownianBridge, VarianceAndCovariance) {
  const std::size_t seeds = 100000;
  std::vector<double> q1(seeds), mid(seeds), q3(seeds);
  const RngStream root(13);
  parallel_for(seeds, [&](std::size_t i) {
    auto r = root.substream(i);
    const auto p = sample_brownian_bridge(256, r);
    q1[i] = p.at(0.25);
    mid[i] = p.at(0.5);
    q3[i] = p.at(0.75);
  });
  const auto v = covariance(mid, mid);
  EXPECT_NEAR(v.cov, 0.25, 3 * v.cov_se);
  const auto c = covariance(q1, q3);
  EXPECT_NEAR(c.cov, 0.0625, 3 * c.cov_se);
}

TEST(EmpiricalProcess, EndsAtZero) {
  RngStream r(6);
  for (std::int64_t n : {1, 2, 17}) {
    const auto p = sample_empirical_process(n, r);
    EXPECT_EQ(p.values.front(), 0.0);
    EXPECT_EQ(p.values.back(), 0.0);
  }
  const auto one = sample_empirical_process(1, r);
  EXPECT_EQ(one.values, (std::vector<double>{0.0, 0.0}));
}

TEST(EmpiricalProcess, VarianceAtHalf) {
  const std::size_t seeds = 100000;
  std::vector<double> mid(seeds);
  const RngStream root(17);
  parallel_for(seeds, [&](std::size_t i) {
    auto r = root.substream(i);
    mid[i] = sample_empirical_process(10000, r).at(0.5);
  });
  const auto v = covariance(mid, mid);
  EXPECT_NEAR(v.cov, 0.25, 3 * v.cov_se);
}
