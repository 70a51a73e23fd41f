#include <random>

#include <gtest/gtest.h>

#include "slab/errors.hpp"
#include "slab/rotation.hpp"
#include "slab/simplex.hpp"

using namespace slab;

namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace

TEST(Simplex, NormalizesFirstVertexToUnitLength) {
  const Simplex s = normalize_simplex({vec({3.0, 0.0, 0.0}), vec({0.0, 6.0, 0.0})});
  EXPECT_EQ(s.k(), 2);
  EXPECT_EQ(s.dim(), 3);
  EXPECT_DOUBLE_EQ(s.vertex(0).norm(), 1.0);
  EXPECT_DOUBLE_EQ(s.vertex(1).norm(), 2.0);
  EXPECT_NEAR(s.gram_determinant(), 4.0, 1e-12);
}

TEST(Simplex, PadsShortVerticesToDimension) {
  const Simplex s = normalize_simplex({vec({1.0})}, 3);
  EXPECT_EQ(s.dim(), 3);
  EXPECT_DOUBLE_EQ(s.vertex(0)[2], 0.0);
}

TEST(Simplex, RejectsDegenerateAndOversizedInput) {
  EXPECT_THROW(normalize_simplex({vec({1.0, 0.0, 0.0}), vec({2.0, 0.0, 0.0})}), DegenerateSimplex);
  EXPECT_THROW(normalize_simplex({vec({1.0, 0.0}), vec({0.0, 1.0})}), DimensionError);
  EXPECT_THROW(normalize_simplex({vec({0.0, 0.0, 0.0})}), DegenerateSimplex);
}

TEST(Simplex, JsonRoundTrip) {
  const Simplex s = normalize_simplex({vec({1.0, 0.0, 0.0}), vec({0.5, 0.7, 0.0})});
  const Simplex t = Simplex::from_json(s.to_json());
  ASSERT_EQ(t.k(), s.k());
  for (int i = 0; i < s.k(); ++i) EXPECT_LT((t.vertex(i) - s.vertex(i)).norm(), 1e-15);
}

TEST(Simplex, CanonicalFrameMatchesGram) {
  const Simplex s = normalize_simplex({vec({1.0, 0.0, 0.0, 0.0}), vec({0.3, 1.1, 0.0, 0.0}),
                                       vec({-0.2, 0.4, 0.9, 0.0})});
  for (int count = 0; count <= 3; ++count) {
    const Frame f = canonical_frame(s, count);
    EXPECT_EQ(f.size(), count);
    EXPECT_LT(f.gram_mismatch(s), 1e-12);
    // Lower-triangular: y_i has no component past axis i.
    for (int i = 0; i < count; ++i)
      for (int a = i + 1; a < 4; ++a) EXPECT_EQ(f.vectors[static_cast<std::size_t>(i)][a], 0.0);
  }
}

// Rotating a frame keeps its Gram matrix.
TEST(SimplexProperty, GramInvariantUnderRotation) {
  const Simplex s = normalize_simplex({vec({1.0, 0.2, 0.0}), vec({0.1, 0.8, 0.5})});
  HaarSampler sampler(3, 11);
  const Frame f = canonical_frame(s, 2);
  for (int trial = 0; trial < 50; ++trial) {
    const Rotation u = sampler.draw();
    EXPECT_LT(rotate_frame(f, u).gram_mismatch(s), 1e-12);
    const auto scaled = apply_rotation_scale(s, u, 2.5);
    const Mat g = gram_matrix(scaled);
    const Mat expected = 6.25 * gram_matrix(s);
    EXPECT_LT((g - expected).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Rotation, RejectsNonOrthogonal) {
  Mat m = Mat::Identity(2, 2);
  m(0, 1) = 0.5;
  EXPECT_THROW(Rotation{m}, Error);
  Mat reflection = Mat::Identity(2, 2);
  reflection(1, 1) = -1.0;
  EXPECT_THROW(Rotation{reflection}, Error);
}
