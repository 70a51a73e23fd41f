#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "slab/linalg.hpp"
#include "slab/simplex.hpp"

namespace slab {

inline constexpr int kDefaultLevel = 6;

// The sphere of admissible positions for the j-th rotated vertex once
// y_1..y_{j-1} are fixed: the intersection of S(0, |v_j|) with
// S(y_i, |v_j - v_i|), i < j.
struct ConfigSphere {
  Vec center;
  double radius = 0.0;
  Mat complement_basis;  // d x (m+1), orthonormal columns spanning span{y}^perp
  int intrinsic_dim = 0;  // m = d - j

  int ambient_dim() const { return static_cast<int>(center.size()); }
  // |xi_perp|: distance from xi to span{y_1..y_{j-1}}.
  double perp_norm(const Vec& xi) const;
};

// Throws DegenerateConfig when radius^2 <= 1e-10 and DimensionError when the
// frame size is not j - 1.
ConfigSphere config_sphere(const Simplex& s, int j, const Frame& frame);

// Product quadrature on the unit sphere S^m in R^{m+1}: points and weights
// summing to one. m = 1 uses 8 * 2^level equispaced nodes; m = 2 uses
// Gauss-Legendre in the polar coordinate (2^level nodes) times 2^(level+1)
// azimuth nodes; m = 3 adds a Gauss-Chebyshev (second kind) factor with
// 2^level nodes.
struct UnitSphereRule {
  int m = 0;
  std::vector<Vec> points;
  std::vector<double> weights;
};
const UnitSphereRule& unit_sphere_rule(int m, int level);

struct SphereRule {
  std::vector<Vec> nodes;
  std::vector<double> weights;
};
SphereRule sphere_rule(const ConfigSphere& cs, int level);

// Maps a unit-sphere point onto the configuration sphere.
inline Vec place_on_sphere(const ConfigSphere& cs, const Vec& unit_point) {
  return cs.center + cs.radius * (cs.complement_basis * unit_point);
}

// Closed-form Fourier transform of the normalized measure on cs (sign
// convention e^{-2 pi i x.xi}).
std::complex<double> sphere_ft(const ConfigSphere& cs, const Vec& xi);
// Gradient in xi of sphere_ft, one complex entry per coordinate.
std::vector<std::complex<double>> sphere_ft_gradient(const ConfigSphere& cs, const Vec& xi);

// Quadrature evaluation of the same transform, used as an oracle.
std::complex<double> sphere_ft_quadrature(const ConfigSphere& cs, const Vec& xi, int level);

struct DecayRow {
  double radius;       // R = |xi_perp|
  double sup_ft;
  double sup_grad_ft;
  double envelope_ratio;  // (sup_ft + sup_grad_ft) (1 + R)^{m/2}
};

struct DecayReport {
  std::vector<DecayRow> rows;
  double envelope_constant = 0.0;  // max envelope ratio over the grid
  double fitted_constant = 0.0;    // max over the first half of the grid
  bool grows = false;              // second half exceeds the fitted constant
  std::string to_csv() const;
};

// For each R, samples `samples_per_radius` frequencies with |xi_perp| = R
// (random in-span part) and records sup |ft|, sup |grad ft|.
DecayReport decay_envelope_check(const ConfigSphere& cs, const std::vector<double>& radii,
                                 int samples_per_radius = 16, std::uint64_t seed = 1,
                                 double growth_tolerance = 0.25);

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace slab
