#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "slab/errors.hpp"
#include "slab/multilinear.hpp"
#include "slab/rotation.hpp"

using namespace slab;

namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace

TEST(NestedRule, NodeCountsAndWeights) {
  const Simplex s = normalize_simplex({vec({1.0, 0.0, 0.0}), vec({0.3, 0.8, 0.0})});
  const NestedRule r1(s, 1, 3), r2(s, 2, 3);
  EXPECT_EQ(r1.outer().size(), 1u);
  EXPECT_EQ(r1.inner().m, 2);
  EXPECT_EQ(r2.inner().m, 1);
  double w = 0.0;
  for (const auto& node : r2.outer()) {
    w += node.weight;
    EXPECT_LT(Frame{node.frame}.gram_mismatch(s), 1e-12);
  }
  EXPECT_NEAR(w, 1.0, 1e-13);
  EXPECT_EQ(r2.node_count(), r2.outer().size() * r2.inner().points.size());
}

TEST(NestedAverage, ConstantsGiveProduct) {
  const GridSpec g{3, 8.0, 8, 2};
  const GridField a(g, 0.5), b(g, 0.3);
  const Simplex s = normalize_simplex({vec({1.0, 0.0, 0.0}), vec({0.0, 1.0, 0.0})});
  const NestedRule rule(s, 2, 3);
  EXPECT_NEAR(nested_average({&a, &b}, Vec::Zero(3), 1.0, rule), 0.15, 1e-13);
}

// A sphere average of an affine function equals its value at the center.
TEST(NestedAverage, AffineMeanValue) {
  const GridSpec g{3, 16.0, 16, 2};
  auto fn = [](const Vec& y) { return 2.0 + 0.3 * y[0] - 0.2 * y[1] + 0.1 * y[2]; };
  const GridField f = GridField::sample(g, fn);
  const Simplex s = normalize_simplex({vec({1.0, 0.0, 0.0})});
  const NestedRule rule(s, 1, 4);
  const Vec x = vec({0.5, -1.0, 0.25});
  EXPECT_NEAR(nested_average({&f}, x, 3.0, rule), fn(x), 1e-12);
  EXPECT_THROW(nested_average({&f}, x, 20.0, rule), OutOfBox);
}

// Independent route: Monte Carlo over Haar rotations.
TEST(NestedAverageProperty, AgreesWithRotationMonteCarlo) {
  const auto r = equivalence_sweep(3, 2, 5, 20000, 3, 32, 99);
  for (const auto& c : r.cases) EXPECT_LT(c.z, 4.5);
}

// Full box in d = 2: count = N^2 - 4 N lambda / pi + lambda^2 / pi.
TEST(CountFunctional, FullBoxOracle) {
  const double N = 64.0, lambda = 6.0;
  const GridSpec g{2, N, 128, 2};
  const GridField a(g, 1.0);
  const Simplex s = normalize_simplex({vec({1.0, 0.0})});
  const NestedRule rule(s, 1, 6);
  const Estimate e = count_functional(a, lambda, rule);
  const double oracle = N * N - 4.0 * N * lambda / std::numbers::pi + lambda * lambda / std::numbers::pi;
  EXPECT_EQ(e.samples, 0);
  EXPECT_NEAR(e.value / oracle, 1.0, 1e-3);
}

TEST(CountFunctional, SampledMatchesFullInThreeDimensions) {
  const GridSpec g{3, 16.0, 16, 2};
  const GridField a(g, 1.0);
  const Simplex s = normalize_simplex({vec({1.0, 0.0, 0.0})});
  const NestedRule rule(s, 1, 3);
  const Estimate sampled = count_functional(a, 2.0, rule, 1024, 3);
  const Estimate full = indicator_sum(
      a, [&](const std::vector<Vec>& xs) { return nested_average({&a}, xs, 2.0, rule); }, true, 0, 0);
  EXPECT_GT(sampled.samples, 0);
  EXPECT_NEAR(sampled.value, full.value, 4.0 * sampled.stderr_ + 1e-9 * full.value);
}

TEST(CellCenters, SamplingCoversGrid) {
  const GridSpec g{2, 4.0, 4, 2};
  EXPECT_EQ(all_cell_centers(g).size(), 16u);
  const auto pts = sample_cell_centers(g, 100, 1);
  for (const auto& p : pts) EXPECT_LT(p.cwiseAbs().maxCoeff(), 2.0);
}

TEST(DifferenceBound, SmallForSmoothInput) {
  const GridSpec g{2, 32.0, 64, 2};
  const GridField f = GridField::sample(g, [](const Vec& y) { return std::exp(-y.squaredNorm() / 20.0); });
  const Simplex line = normalize_simplex({vec({1.0, 0.0})});
  const NestedRule rule(line, 1, 4);
  const auto r = difference_bound_check(f, 0.5, 2.0, rule, sample_cell_centers(g, 50, 2));
  EXPECT_EQ(r.points, 50);
  EXPECT_GE(r.sup_difference, 0.0);
  EXPECT_NEAR(r.ratio, r.sup_difference / 0.5, 1e-15);
}
