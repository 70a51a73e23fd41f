#include <cmath>

#include <gtest/gtest.h>

#include "slab/calibration.hpp"
#include "slab/mollifier.hpp"

using namespace slab;

TEST(Calibration, MollifierConstantsDominateMeasuredRatios) {
  const MollifierConstants c = calibrate_mollifier(2);
  const Mollifier& m = mollifier(2);
  EXPECT_DOUBLE_EQ(c.C_psi, m.hat_slope_constant());
  EXPECT_GE(c.C_shift, 1.01 * m.gradient_l1() * (1.0 - 1e-12));
  for (double eta : {0.3, 0.07, 0.015}) {
    EXPECT_LE(m.tail_integral(1.0 / eta) / eta, c.C_tail);
    EXPECT_LE(m.shift_modulus(eta) / eta, c.C_shift);
  }
}

TEST(Calibration, LimitsFollowMode) {
  CalibratedConstants k;
  k.c0 = 5.0;
  k.c_cal = 2.0;
  k.c_cal_pinned = 3.0;
  k.C_cal = 7.0;
  const DichotomyLimits u = limits_from(k, false), p = limits_from(k, true);
  EXPECT_EQ(u.floor_constant, 5.0);
  EXPECT_EQ(u.eta_constant, 2.0);
  EXPECT_EQ(p.eta_constant, 3.0);
  EXPECT_EQ(p.box_constant, 7.0);
}

TEST(Calibration, SetupsAreAdmissible) {
  const DichotomySetup u = unpinned_setup(), p = pinned_setup();
  EXPECT_LE(u.params.lambda, std::pow(u.params.eta, 4) * u.grid.N);
  EXPECT_LE(p.params.lambda1, std::pow(p.params.eta, 4) * p.grid.N);
  EXPECT_EQ(u.simplex.k(), 1);
  EXPECT_EQ(p.grid.d, 3);
}
