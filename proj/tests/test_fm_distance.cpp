#include <gtest/gtest.h>

#include <cmath>

#include "bridge_rate/fm_distance.hpp"
#include "bridge_rate/path_sim.hpp"
#include "bridge_rate/transport.hpp"
#include "oracles.hpp"

using namespace bridge_rate;

namespace {

PathSample constant_path(double c) {
  return PathSample::on_grid({0.0, c, c}, PathKind::imported);
}

EmpiricalMeasure point_mass(const PathSample& p) { return EmpiricalMeasure::uniform({p}); }

std::vector<PathSample> random_paths(RngStream& r, std::size_t count, double scale) {
  std::vector<PathSample> out;
  for (std::size_t i = 0; i < count; ++i) {
    auto p = sample_brownian_bridge(8 + static_cast<std::int64_t>(i % 3), r);
    for (auto& v : p.values) v *= scale;
    out.push_back(p);
  }
  return out;
}

EmpiricalMeasure random_measure(RngStream& r, std::size_t atoms, double scale) {
  EmpiricalMeasure m;
  m.paths = random_paths(r, atoms, scale);
  double total = 0;
  for (std::size_t i = 0; i < atoms; ++i) {
    m.weights.push_back(0.1 + r.uniform());
    total += m.weights.back();
  }
  for (auto& w : m.weights) w /= total;
  return m;
}

// Literal dual LP over the union of atoms.
double fm_oracle(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  std::vector<PathSample> pts = mu.paths;
  pts.insert(pts.end(), nu.paths.begin(), nu.paths.end());
  std::vector<double> mass(pts.size(), 0.0);
  for (std::size_t i = 0; i < mu.paths.size(); ++i) mass[i] = mu.weights[i];
  for (std::size_t j = 0; j < nu.paths.size(); ++j) mass[mu.paths.size() + j] = -nu.weights[j];
  std::vector<std::vector<double>> d(pts.size(), std::vector<double>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) d[i][j] = path_supnorm(pts[i], pts[j]);
  }
  return oracle::fm_dual_lp(d, mass);
}

}  // namespace

TEST(TransportSimplex, SmallKnownInstance) {
  const std::vector<std::int64_t> supply{3, 2};
  const std::vector<std::int64_t> demand{1, 4};
  const std::vector<double> cost{1.0, 5.0, 2.0, 1.0};
  TransportSimplex s(supply, demand, cost);
  // ship 1 (0->0) at 1, 2 (0->1) at 5, 2 (1->1) at 1
  EXPECT_DOUBLE_EQ(s.solve(), 1.0 + 10.0 + 2.0);
  EXPECT_EQ(s.flow(0, 0) + s.flow(0, 1), 3);
}

TEST(TransportSimplex, AgreesWithAssignmentOracle) {
  RngStream r(10);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<std::vector<double>> c(6, std::vector<double>(6));
    std::vector<double> flat;
    for (auto& row : c) {
      for (auto& x : row) {
        x = r.uniform();
        flat.push_back(x);
      }
    }
    const std::vector<std::int64_t> ones(6, 1);
    TransportSimplex s(ones, ones, flat);
    EXPECT_NEAR(s.solve(), oracle::assignment_min(c), 1e-12);
  }
}

TEST(FmDistance, IdenticalMeasures) {
  RngStream r(1);
  auto paths = random_paths(r, 6, 1.0);
  const auto mu = EmpiricalMeasure::uniform(paths);
  EXPECT_NEAR(fm_empirical(mu, mu).value, 0.0, 1e-10);
  EXPECT_NEAR(w1_empirical(mu, mu).value, 0.0, 1e-10);
}

TEST(FmDistance, PointMasses) {
  const auto p = constant_path(0.0);
  for (double c : {0.3, 1.5, 2.0, 3.7}) {
    const auto q = constant_path(c);
    EXPECT_NEAR(fm_empirical(point_mass(p), point_mass(q)).value, std::min(c, 2.0), 1e-12) << c;
    EXPECT_NEAR(w1_empirical(point_mass(p), point_mass(q)).value, c, 1e-12) << c;
  }
}

TEST(FmDistance, HalfMass) {
  const auto p = constant_path(0.0);
  const auto q = constant_path(0.6);
  EmpiricalMeasure mu{{p, q}, {0.5, 0.5}};
  EXPECT_NEAR(fm_empirical(mu, point_mass(p)).value, 0.3, 1e-12);
  EXPECT_NEAR(fm_oracle(mu, point_mass(p)), 0.3, 1e-12);
}

TEST(FmDistance, AgreesWithDualLpOracle) {
  RngStream r(2);
  for (int rep = 0; rep < 10; ++rep) {
    const auto mu = random_measure(r, 4, 1.5);
    const auto nu = random_measure(r, 3, 0.8);
    EXPECT_NEAR(fm_empirical(mu, nu).value, fm_oracle(mu, nu), 1e-9);
  }
}

TEST(FmDistance, DuplicatesAreMerged) {
  RngStream r(3);
  auto paths = random_paths(r, 3, 1.0);
  auto doubled = paths;
  doubled.insert(doubled.end(), paths.begin(), paths.end());
  const auto nu = EmpiricalMeasure::uniform(random_paths(r, 4, 1.0));
  EXPECT_NEAR(fm_empirical(EmpiricalMeasure::uniform(paths), nu).value,
              fm_empirical(EmpiricalMeasure::uniform(doubled), nu).value, 1e-12);
}

TEST(W1Distance, AssignmentOracle) {
  RngStream r(4);
  for (int rep = 0; rep < 10; ++rep) {
    auto a = random_paths(r, 5, 2.0);
    auto b = random_paths(r, 5, 2.0);
    std::vector<std::vector<double>> c(5, std::vector<double>(5));
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) c[i][j] = path_supnorm(a[i], b[j]);
    const double w1 = w1_empirical(EmpiricalMeasure::uniform(a), EmpiricalMeasure::uniform(b)).value;
    EXPECT_NEAR(w1, oracle::assignment_min(c) / 5.0, 1e-8);
  }
}

TEST(FmDistance, MetricAxiomsAndBoundByW1) {
  RngStream r(5);
  for (int rep = 0; rep < 10; ++rep) {
    const auto a = random_measure(r, 5, 2.0);
    const auto b = random_measure(r, 4, 2.0);
    const auto c = random_measure(r, 6, 2.0);
    const double ab = fm_empirical(a, b).value;
    EXPECT_NEAR(ab, fm_empirical(b, a).value, 1e-12);
    EXPECT_LE(ab, fm_empirical(a, c).value + fm_empirical(c, b).value + 1e-8);
    EXPECT_LE(ab, w1_empirical(a, b).value + 1e-12);
  }
}

TEST(FmDistance, AtomCap) {
  RngStream r(6);
  std::vector<PathSample> many;
  for (int i = 0; i < 2001; ++i) many.push_back(sample_brownian_bridge(4, r));
  const auto mu = EmpiricalMeasure::uniform(many);
  try {
    fm_empirical(mu, mu);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SizeCap);
  }
}

TEST(FmDistance, RejectsBadWeights) {
  EmpiricalMeasure bad{{constant_path(0.0)}, {0.5}};
  EXPECT_THROW(fm_empirical(bad, bad), Error);
}

TEST(SupnormMatrix, FastPathMatchesPairwise) {
  RngStream r(7);
  std::vector<PathSample> a, b;
  for (int i = 0; i < 7; ++i) a.push_back(sample_brownian_bridge(16, r));
  for (int i = 0; i < 5; ++i) b.push_back(restrict(sample_brownian_bridge(64, r), 0.41));
  const auto m = supnorm_matrix(a, b);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) EXPECT_NEAR(m[i * b.size() + j], path_supnorm(a[i], b[j]), 1e-14);
}

TEST(FmBootstrap, DegenerateAndShrinking) {
  const PathSampler flat = [](RngStream&) { return PathSample::on_grid({0.0, 0.0}, PathKind::imported); };
  const auto zero = fm_bootstrap(flat, flat, 50, 50, 20, RngStream(1));
  EXPECT_EQ(zero.value, 0.0);
  EXPECT_EQ(zero.half_width, 0.0);

  const PathSampler bridge = [](RngStream& r) { return sample_brownian_bridge(16, r); };
  const auto small = fm_bootstrap(bridge, bridge, 100, 100, 20, RngStream(2));
  const auto large = fm_bootstrap(bridge, bridge, 400, 400, 20, RngStream(3));
  EXPECT_GT(small.value, 0.0);
  EXPECT_LT(large.value, small.value);
  EXPECT_THROW(fm_bootstrap(bridge, bridge, 10, 10, 5, RngStream(4)), Error);
}

TEST(FmBootstrap, HalfWidthScalesWithReps) {
  const PathSampler bridge = [](RngStream& r) { return sample_brownian_bridge(16, r); };
  const auto a = fm_bootstrap(bridge, bridge, 100, 100, 20, RngStream(5));
  const auto b = fm_bootstrap(bridge, bridge, 100, 100, 80, RngStream(6));
  EXPECT_GT(a.half_width, 0.0);
  EXPECT_LT(std::max(a.half_width, b.half_width) / std::min(a.half_width, b.half_width), 2.5);
}
