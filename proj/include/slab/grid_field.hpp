#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "slab/linalg.hpp"

namespace slab {

// Uniform cell-centered grid on the box B_N = [-N/2, N/2]^d with n cells per
// axis. Spectral work happens on the zero-padded torus of side pad * N.
struct GridSpec {
  int d = 2;
  double N = 1.0;
  int n = 2;
  int pad = 2;

  double h() const { return N / n; }
  std::size_t cells() const;
  int padded_n() const { return n * pad; }
  double padded_half_width() const { return 0.5 * pad * N; }
  // Frequency lattice spacing 1 / (N pad).
  double freq_step() const { return 1.0 / (N * pad); }
  // Axis Nyquist frequency 1 / (2h).
  double nyquist() const { return 0.5 / h(); }
  // Largest |xi| present on the frequency lattice (the corner radius).
  double max_frequency() const;
  double cell_volume() const;
  double box_volume() const;

  // Throws ParamError when d, n, N or pad are out of range.
  void validate() const;
  bool operator==(const GridSpec&) const = default;
};

class GridField {
 public:
  GridField() = default;
  explicit GridField(GridSpec spec, double fill = 0.0);
  GridField(GridSpec spec, std::vector<double> values);

  const GridSpec& spec() const { return spec_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  // Row-major flat index <-> multi-index (axis 0 slowest).
  std::size_t flat_index(const int* idx) const;
  void multi_index(std::size_t flat, int* idx) const;
  Vec cell_center(std::size_t flat) const;

  // Zero outside [0,1]; values in {0,1} only.
  bool is_indicator() const;

  // Multilinear interpolation of the cell-centered samples with zero
  // extension past the outermost centers. Throws OutOfBox outside the padded
  // box [-pad N/2, pad N/2]^d.
  double interpolate(const Vec& x) const;
  bool inside_padded_box(const Vec& x) const;

  // Samples fn at every cell center.
  static GridField sample(const GridSpec& spec, const std::function<double(const Vec&)>& fn);

 private:
  GridSpec spec_;
  std::vector<double> values_;
};

// h^d * sum of values; |A| for an indicator.
double measure(const GridField& f);
// h^d * sum of squared values.
double l2_norm_squared(const GridField& f);

// Physically scaled DFT on the zero-padded torus: coefficient at the lattice
// frequency xi approximates the integral of f(x) e^{-2 pi i x.xi}.
class Spectrum {
 public:
  Spectrum(GridSpec spec, std::vector<std::complex<double>> coeffs);

  const GridSpec& spec() const { return spec_; }
  const std::vector<std::complex<double>>& coeffs() const { return coeffs_; }
  std::vector<std::complex<double>>& coeffs() { return coeffs_; }
  std::size_t size() const { return coeffs_.size(); }

  // Signed integer frequency index along each axis, in [-M/2, M/2).
  void frequency_index(std::size_t flat, int* k) const;
  Vec frequency(std::size_t flat) const;
  // |xi| for every coefficient, in storage order.
  std::vector<double> frequency_norms() const;
  // Position of the coefficient for the given signed index.
  std::size_t flat_of_frequency(const int* k) const;
  // Volume of one frequency cell, (1/(N pad))^d.
  double cell_volume() const;

 private:
  GridSpec spec_;
  std::vector<std::complex<double>> coeffs_;
};

Spectrum forward_transform(const GridField& f);
// Inverse restricted to the original n^d cells of B_N.
GridField inverse_transform(const Spectrum& s);
// Inverse on the whole padded torus, returned as a field over the padded box
// with pad = 1.
GridField inverse_transform_extended(const Spectrum& s);

// Inverse transform over the whole padded torus, in torus storage order with
// torus index i at position -N/2 + (i + 1/2) h (mod pad N).
std::vector<std::complex<double>> inverse_torus(Spectrum s);
// Forward transform of values given over the whole padded torus.
Spectrum forward_torus(const GridSpec& spec, std::vector<std::complex<double>> values);
// In-place unnormalized d-dimensional DFT of side m; sign -1 forward, +1
// backward.
void fft_inplace(std::vector<std::complex<double>>& data, int d, int m, int sign);

// sum |coeff|^2 * frequency cell volume.
double spectral_energy(const Spectrum& s);

// Midpoint-rule integral of |f^|^2 over lower <= |xi| <= upper. Throws
// RangeError unless 0 <= lower < upper <= max_frequency().
double annulus_mass(const Spectrum& s, double lower, double upper);

// Masses of several closed annuli where a frequency cell lying on a shared
// endpoint is credited to the first listed annulus only.
std::vector<double> disjoint_annulus_masses(const Spectrum& s,
                                            const std::vector<std::pair<double, double>>& annuli);

// Multiplies every coefficient by fn(xi).
Spectrum apply_multiplier(const Spectrum& s,
                          const std::function<std::complex<double>(const Vec&)>& fn);
// Multiplies every coefficient by fn(|xi|).
Spectrum apply_radial_multiplier(const Spectrum& s, const std::function<double(double)>& fn);

// Monte Carlo estimate of the annulus mass by direct Fourier sums over the
// support of f, for grids too large to transform (d = 4).
struct MassEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
  int samples = 0;
};
MassEstimate annulus_mass_direct(const GridField& f, double lower, double upper, int samples,
                                 std::uint64_t seed);

// Set files: "SLAB" magic, u32 version = 1, u32 d, u32 n, f64 N, then n^d
// bytes (0/1) row-major. All integers little-endian.
void write_set_binary(const GridField& indicator, const std::string& path);
GridField read_set_binary(const std::string& path);
nlohmann::json set_to_json(const GridField& indicator);
GridField set_from_json(const nlohmann::json& j);
// Dispatches on the file's leading bytes.
GridField read_set(const std::string& path);

}  // namespace slab
