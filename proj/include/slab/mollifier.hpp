#pragma once

#include <vector>

#include "slab/grid_field.hpp"
#include "slab/linalg.hpp"
#include "slab/sphere.hpp"

namespace slab {

// Positive radial Schwartz function psi on R^d whose Fourier transform h is
// radial, 0 <= h <= h(0) = 1 and h(r) = 0 for r >= 1.
//
// With chi(r) = exp(-a / (1 - 4 r^2)) on r < 1/2 and phi the inverse
// transform of chi, psi = (phi(x)^2 + phi(x/s)^2) / norm. Both squares have
// transforms supported in the unit ball; the second keeps psi away from the
// zeros of phi.
class Mollifier {
 public:
  explicit Mollifier(int d);

  int dim() const { return d_; }
  // Fourier profile h(|xi|).
  double hat(double r) const;
  // Radial profile psi(|x|); zero past the tabulation radius.
  double psi(double r) const;
  double psi_derivative(double r) const;
  // psi_t(x) = t^{-d} psi(x / t).
  double psi_t(double t, const Vec& x) const;

  // Radius past which |psi| < 1e-14.
  double tabulation_radius() const { return radius_; }
  // Radial quadrature of psi over the tabulated ball.
  double integral() const;
  // Integral of psi over |x| >= r.
  double tail_integral(double r) const;
  // Integral of |psi(x - a e_1) - psi(x)| over R^d.
  double shift_modulus(double a) const;
  // Integral of |d psi / d x_1| over R^d.
  double gradient_l1() const;

  // sup over r in (0, 1) of |1 - h(r)| / r.
  double hat_slope_constant() const;

 private:
  int d_;
  double step_;
  double radius_ = 0.0;
  std::vector<double> psi_table_;
  double hat_step_;
  std::vector<double> hat_table_;
};

// Shared instance per dimension, built on first use.
const Mollifier& mollifier(int d);

// f * psi_t computed spectrally: f^ times h(t |xi|).
Spectrum mollify(const Spectrum& s, const Mollifier& m, double t);
GridField mollify(const GridField& f, const Mollifier& m, double t);

struct HatDeviationReport {
  double sup_ratio = 0.0;  // sup |1 - h(t|xi|)| / min(1, t|xi|)
  double constant = 0.0;
  bool exceeds = false;
};
HatDeviationReport hat_deviation_bound(const Mollifier& m, double t,
                                       const std::vector<double>& frequencies,
                                       double constant);

struct TailShiftReport {
  double tail = 0.0;          // integral of psi_t over |x| >= t / eta
  double tail_ratio = 0.0;    // tail / eta
  double shift = 0.0;         // sphere-averaged L1 shift modulus
  double shift_ratio = 0.0;   // shift / eta
  double vertex_norm = 0.0;   // |y| on the configuration sphere
};
// Throws PreconditionError unless 0 < eta < 1 and t >= lambda / eta.
TailShiftReport tail_and_shift_bounds(const Mollifier& m, double eta, double t, double lambda,
                                      const ConfigSphere& cs);

}  // namespace slab
