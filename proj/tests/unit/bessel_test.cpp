#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "slab/bessel.hpp"

using namespace slab;

TEST(Bessel, MatchesStandardLibrary) {
  for (int order = 0; order <= 2; ++order)
    for (double t = 0.0; t <= 400.0; t += 0.173)
      EXPECT_NEAR(bessel::jn(order, t), std::cyl_bessel_j(static_cast<double>(order), t), 2e-12)
          << "order " << order << " t " << t;
}

TEST(Bessel, OddSymmetry) {
  for (double t : {0.5, 3.0, 17.0}) {
    EXPECT_DOUBLE_EQ(bessel::j0(-t), bessel::j0(t));
    EXPECT_DOUBLE_EQ(bessel::j1(-t), -bessel::j1(t));
  }
}

// Profile of S^m: Gamma((m+1)/2) (t/2)^{-(m-1)/2} J_{(m-1)/2}(t).
TEST(SphereProfile, MatchesBesselOracle) {
  for (int m = 1; m <= 3; ++m) {
    EXPECT_EQ(bessel::sphere_profile(m, 0.0), 1.0);
    const double nu = 0.5 * (m - 1);
    for (double t = 0.01; t < 200.0; t *= 1.17) {
      const double oracle = std::tgamma(nu + 1.0) * std::pow(0.5 * t, -nu) * std::cyl_bessel_j(nu, t);
      EXPECT_NEAR(bessel::sphere_profile(m, t), oracle, 2e-12) << "m " << m << " t " << t;
    }
  }
}

TEST(SphereProfile, DerivativeMatchesFiniteDifference) {
  const double step = 1e-5;
  for (int m = 1; m <= 3; ++m) {
    EXPECT_NEAR(bessel::sphere_profile_derivative(m, 0.0), 0.0, 1e-15);
    for (double t : {0.3, 2.0, 9.5, 60.0}) {
      const double fd = (bessel::sphere_profile(m, t + step) - bessel::sphere_profile(m, t - step)) / (2.0 * step);
      EXPECT_NEAR(bessel::sphere_profile_derivative(m, t), fd, 1e-8) << "m " << m << " t " << t;
    }
  }
}
