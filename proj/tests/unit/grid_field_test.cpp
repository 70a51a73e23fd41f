#include <cmath>
#include <complex>
#include <filesystem>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "slab/errors.hpp"
#include "slab/grid_field.hpp"

using namespace slab;

namespace {

constexpr double kPi = std::numbers::pi;

GridField random_field(const GridSpec& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  GridField f(g);
  for (auto& v : f.values()) v = u(rng);
  return f;
}

}  // namespace

TEST(GridSpec, Geometry) {
  const GridSpec g{2, 16.0, 64, 2};
  EXPECT_DOUBLE_EQ(g.h(), 0.25);
  EXPECT_EQ(g.cells(), 4096u);
  EXPECT_DOUBLE_EQ(g.freq_step(), 1.0 / 32.0);
  EXPECT_DOUBLE_EQ(g.nyquist(), 2.0);
  EXPECT_DOUBLE_EQ(g.max_frequency(), std::sqrt(2.0) * 64.0 / 32.0);
  EXPECT_THROW((GridSpec{5, 1.0, 4, 2}.validate()), Error);
  EXPECT_THROW((GridSpec{2, -1.0, 4, 2}.validate()), Error);
  EXPECT_THROW((GridSpec{2, 6.0, 6, 2}.validate()), Error);
  EXPECT_THROW((GridSpec{4, 8.0, 64, 2}.validate()), Error);
  EXPECT_NO_THROW((GridSpec{4, 8.0, 32, 2}.validate()));
}

TEST(GridField, IndexRoundTrip) {
  const GridField f(GridSpec{3, 3.2, 4, 2});
  int idx[3];
  for (std::size_t i = 0; i < f.size(); ++i) {
    f.multi_index(i, idx);
    EXPECT_EQ(f.flat_index(idx), i);
  }
  EXPECT_NEAR(f.cell_center(0)[0], -1.2, 1e-15);
}

// Multilinear interpolation reproduces multilinear functions.
TEST(GridField, InterpolationExactOnBilinear) {
  const GridSpec g{2, 8.0, 16, 2};
  auto fn = [](const Vec& x) { return 1.0 + 0.5 * x[0] - 0.25 * x[1] + 0.125 * x[0] * x[1]; };
  const GridField f = GridField::sample(g, fn);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3.7, 3.7);
  for (int i = 0; i < 200; ++i) {
    Vec x(2);
    x << u(rng), u(rng);
    EXPECT_NEAR(f.interpolate(x), fn(x), 1e-12);
  }
}

TEST(GridField, ZeroExtensionAndBounds) {
  const GridSpec g{2, 4.0, 8, 2};
  const GridField one(g, 1.0);
  Vec far(2);
  far << 3.9, 0.0;
  EXPECT_EQ(one.interpolate(far), 0.0);
  far << 4.1, 0.0;
  EXPECT_THROW(one.interpolate(far), OutOfBox);
}

// Forward transform of exp(-pi |x|^2) is exp(-pi |xi|^2).
TEST(Transform, GaussianClosedForm) {
  for (int d = 1; d <= 3; ++d) {
    const GridSpec g{d, 16.0, 64, 2};
    const GridField f = GridField::sample(g, [](const Vec& x) { return std::exp(-kPi * x.squaredNorm()); });
    const Spectrum s = forward_transform(f);
    double worst = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const Vec xi = s.frequency(i);
      if (xi.norm() > 1.5) continue;
      worst = std::max(worst, std::abs(s.coeffs()[i] - std::exp(-kPi * xi.squaredNorm())));
    }
    EXPECT_LT(worst, 1e-5) << "d " << d;
  }
}

TEST(Transform, ParsevalAndInverse) {
  const GridSpec g{2, 10.0, 32, 2};
  const GridField f = random_field(g, 4);
  const Spectrum s = forward_transform(f);
  EXPECT_NEAR(spectral_energy(s) / l2_norm_squared(f), 1.0, 1e-12);
  const GridField back = inverse_transform(s);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(back[i], f[i], 1e-12);
  const GridField ext = inverse_transform_extended(s);
  EXPECT_EQ(ext.spec().n, 64);
  EXPECT_NEAR(l2_norm_squared(ext), l2_norm_squared(f), 1e-10);
  for (std::size_t i = 0; i < ext.size(); ++i) {
    const Vec x = ext.cell_center(i);
    if (x.cwiseAbs().maxCoeff() < 4.9) {
      EXPECT_NEAR(ext[i], f.interpolate(x), 1e-10);
    }
  }
}

TEST(Transform, FftMatchesDirectSum) {
  const int m = 6;
  std::vector<std::complex<double>> data(m * m);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n;
  for (auto& v : data) v = {n(rng), n(rng)};
  auto copy = data;
  fft_inplace(copy, 2, m, -1);
  for (int k0 = 0; k0 < m; ++k0)
    for (int k1 = 0; k1 < m; ++k1) {
      std::complex<double> sum = 0.0;
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
          sum += data[static_cast<std::size_t>(a * m + b)] * std::polar(1.0, -2.0 * kPi * (k0 * a + k1 * b) / m);
      EXPECT_LT(std::abs(sum - copy[static_cast<std::size_t>(k0 * m + k1)]), 1e-12);
    }
}

TEST(AnnulusMass, FullRangeIsEnergyAndDisjointSumsBounded) {
  const GridSpec g{2, 32.0, 64, 2};
  std::mt19937_64 rng(8);
  std::bernoulli_distribution bit(0.4);
  GridField a(g);
  for (auto& v : a.values()) v = bit(rng) ? 1.0 : 0.0;
  const Spectrum s = forward_transform(a);
  EXPECT_NEAR(annulus_mass(s, 0.0, g.max_frequency()), spectral_energy(s), 1e-9 * spectral_energy(s));
  std::vector<std::pair<double, double>> annuli;
  for (double r = 0.0; r < g.max_frequency() - 0.1; r += 0.1) annuli.push_back({r, r + 0.1});
  double total = 0.0;
  for (double m : disjoint_annulus_masses(s, annuli)) total += m;
  EXPECT_LE(total / measure(a), 1.0 + 1e-6);
  EXPECT_THROW(annulus_mass(s, 0.5, 0.4), RangeError);
  EXPECT_THROW(annulus_mass(s, 0.0, 2.0 * g.max_frequency()), RangeError);
}

TEST(AnnulusMass, DirectEstimateAgrees) {
  const GridSpec g{2, 16.0, 32, 2};
  std::mt19937_64 rng(5);
  std::bernoulli_distribution bit(0.3);
  GridField a(g);
  for (auto& v : a.values()) v = bit(rng) ? 1.0 : 0.0;
  const double exact = annulus_mass(forward_transform(a), 0.2, 0.6);
  const MassEstimate e = annulus_mass_direct(a, 0.2, 0.6, 4000, 3);
  EXPECT_LT(std::abs(e.estimate - exact), 4.0 * e.stderr_ + 0.02 * exact);
}

TEST(Multiplier, RadialOneIsIdentity) {
  const GridSpec g{2, 8.0, 16, 2};
  const GridField f = random_field(g, 9);
  const Spectrum s = forward_transform(f);
  const Spectrum t = apply_radial_multiplier(s, [](double) { return 1.0; });
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(s.coeffs()[i], t.coeffs()[i]);
}

TEST(SetIo, BinaryAndJsonRoundTrip) {
  const GridSpec g{3, 6.0, 8, 2};
  std::mt19937_64 rng(1);
  std::bernoulli_distribution bit(0.5);
  GridField a(g);
  for (auto& v : a.values()) v = bit(rng) ? 1.0 : 0.0;
  const auto dir = std::filesystem::temp_directory_path();
  const std::string bin = (dir / "slab_unit_set.slab").string();
  write_set_binary(a, bin);
  const GridField b = read_set(bin);
  EXPECT_EQ(b.spec(), a.spec());
  EXPECT_EQ(b.values(), a.values());
  const GridField c = set_from_json(set_to_json(a));
  EXPECT_EQ(c.values(), a.values());
  std::filesystem::remove(bin);
  EXPECT_THROW(read_set((dir / "slab_unit_missing.slab").string()), IOError);
  GridField half(g, 0.5);
  EXPECT_THROW(write_set_binary(half, bin), Error);
}
