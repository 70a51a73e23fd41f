#include "slab/bessel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace slab::bessel {
namespace {

constexpr double kSeriesLimit = 12.0;

double series(int order, double t) {
  const double half = 0.5 * t;
  const double q = -half * half;
  double term = 1.0;
  for (int i = 1; i <= order; ++i) term *= half / i;
  double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * (k + order));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

// Hankel's expansion J_n(t) = sqrt(2/(pi t)) (P cos w - Q sin w),
// w = t - (2n+1) pi / 4. Terms are summed until they stop shrinking.
double asymptotic(int order, double t) {
  const double mu = 4.0 * order * order;
  const double x8 = 8.0 * t;
  double p = 1.0, q = 0.0;
  double term = 1.0;
  double last = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (k * x8);
    if (std::abs(term) > last) break;
    last = std::abs(term);
    switch (k % 4) {
      case 1: q += term; break;
      case 2: p -= term; break;
      case 3: q -= term; break;
      case 0: p += term; break;
    }
    if (last < 1e-17) break;
  }
  const double w = t - (2.0 * order + 1.0) * std::numbers::pi / 4.0;
  return std::sqrt(2.0 / (std::numbers::pi * t)) * (p * std::cos(w) - q * std::sin(w));
}

}  // namespace

double jn(int order, double t) {
  if (order < 0 || order > 2) throw std::invalid_argument("bessel order must be 0, 1 or 2");
  const double sign = (t < 0.0 && (order % 2 == 1)) ? -1.0 : 1.0;
  const double a = std::abs(t);
  return sign * (a <= kSeriesLimit ? series(order, a) : asymptotic(order, a));
}

double j0(double t) { return jn(0, t); }
double j1(double t) { return jn(1, t); }
double j2(double t) { return jn(2, t); }

double sphere_profile(int m, double t) {
  const double a = std::abs(t);
  switch (m) {
    case 1:
      return j0(a);
    case 2:
      if (a < 1e-4) return 1.0 - a * a / 6.0 + a * a * a * a / 120.0;
      return std::sin(a) / a;
    case 3:
      if (a < 1e-4) return 1.0 - a * a / 8.0 + a * a * a * a / 192.0;
      return 2.0 * j1(a) / a;
    default:
      throw std::invalid_argument("sphere profile implemented for m = 1, 2, 3");
  }
}

double sphere_profile_derivative(int m, double t) {
  const double sign = t < 0.0 ? -1.0 : 1.0;
  const double a = std::abs(t);
  switch (m) {
    case 1:
      return -sign * j1(a);
    case 2:
      if (a < 1e-4) return sign * (-a / 3.0 + a * a * a / 30.0);
      return sign * (a * std::cos(a) - std::sin(a)) / (a * a);
    case 3:
      if (a < 1e-4) return sign * (-a / 4.0 + a * a * a / 48.0);
      return -sign * 2.0 * j2(a) / a;
    default:
      throw std::invalid_argument("sphere profile implemented for m = 1, 2, 3");
  }
}

}  // namespace slab::bessel
