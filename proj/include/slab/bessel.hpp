#pragma once

namespace slab::bessel {

// Bessel functions of the first kind for integer order 0..2.
// Power series for |t| <= 12, Hankel asymptotic expansion beyond.
double j0(double t);
double j1(double t);
double j2(double t);
double jn(int order, double t);

// Normalized Fourier profile of the uniform probability measure on the unit
// sphere S^m in R^{m+1}: profile(m, 0) = 1 and
//   sigma^(xi) = profile(m, 2 pi |xi|).
// m = 1: J0(t); m = 2: sin(t)/t; m = 3: 2 J1(t)/t.
double sphere_profile(int m, double t);
// d/dt of sphere_profile.
double sphere_profile_derivative(int m, double t);

}  // namespace slab::bessel
