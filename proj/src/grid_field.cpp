#include "slab/grid_field.hpp"

#include <fftw3.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>
#include <numbers>
#include <random>

#include "slab/errors.hpp"
#include "slab/parallel.hpp"
#include "slab/random.hpp"

namespace slab {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t ipow(std::size_t base, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// Per-axis phase e^{sign 2 pi i x0 xi_k} for k in [0, M).
std::vector<std::complex<double>> axis_phase(const GridSpec& spec, double sign) {
  const int m = spec.padded_n();
  const double x0 = -0.5 * spec.N + 0.5 * spec.h();
  std::vector<std::complex<double>> phase(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    const int s = k < m / 2 ? k : k - m;
    phase[static_cast<std::size_t>(k)] = std::polar(1.0, sign * kTwoPi * x0 * s * spec.freq_step());
  }
  return phase;
}

void check_little_endian() {
  if constexpr (std::endian::native != std::endian::little) {
    throw IOError("set files are only supported on little-endian hosts");
  }
}

}  // namespace

void fft_inplace(std::vector<std::complex<double>>& data, int d, int m, int sign) {
  if (data.size() != ipow(static_cast<std::size_t>(m), d)) throw ParamError("FFT buffer has the wrong size");
  int dims[kMaxDim];
  for (int a = 0; a < d; ++a) dims[a] = m;
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft(d, dims, ptr, ptr, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard lock(fftw_planner_mutex());
  fftw_destroy_plan(plan);
}

std::size_t GridSpec::cells() const { return ipow(static_cast<std::size_t>(n), d); }

double GridSpec::max_frequency() const {
  return std::sqrt(static_cast<double>(d)) * 0.5 * padded_n() * freq_step();
}

double GridSpec::cell_volume() const { return std::pow(h(), d); }
double GridSpec::box_volume() const { return std::pow(N, d); }

void GridSpec::validate() const {
  if (d < 1 || d > kMaxDim) throw ParamError("grid dimension must be in [1, 4]");
  if (n < 2 || (n & (n - 1)) != 0) throw ParamError("grid points per axis must be a power of two");
  if (d == 4 && n > 32) throw ParamError("d = 4 grids allow at most 32 points per axis");
  if (!(N > 0.0)) throw ParamError("box side N must be positive");
  if (pad < 1) throw ParamError("padding factor must be >= 1");
}

GridField::GridField(GridSpec spec, double fill) : spec_(spec) {
  spec_.validate();
  values_.assign(spec_.cells(), fill);
}

GridField::GridField(GridSpec spec, std::vector<double> values)
    : spec_(spec), values_(std::move(values)) {
  spec_.validate();
  if (values_.size() != spec_.cells()) throw ParamError("field size does not match grid");
}

std::size_t GridField::flat_index(const int* idx) const {
  std::size_t f = 0;
  for (int a = 0; a < spec_.d; ++a) f = f * static_cast<std::size_t>(spec_.n) + static_cast<std::size_t>(idx[a]);
  return f;
}

void GridField::multi_index(std::size_t flat, int* idx) const {
  for (int a = spec_.d - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % static_cast<std::size_t>(spec_.n));
    flat /= static_cast<std::size_t>(spec_.n);
  }
}

Vec GridField::cell_center(std::size_t flat) const {
  int idx[kMaxDim];
  multi_index(flat, idx);
  Vec x(spec_.d);
  const double h = spec_.h();
  for (int a = 0; a < spec_.d; ++a) x[a] = -0.5 * spec_.N + (idx[a] + 0.5) * h;
  return x;
}

bool GridField::is_indicator() const {
  for (double v : values_)
    if (v != 0.0 && v != 1.0) return false;
  return true;
}

bool GridField::inside_padded_box(const Vec& x) const {
  const double w = spec_.padded_half_width();
  for (int a = 0; a < spec_.d; ++a)
    if (!(std::abs(x[a]) <= w)) return false;
  return true;
}

namespace {

template <int D>
double interpolate_fixed(const std::vector<double>& values, const GridSpec& spec, const Vec& x) {
  const double inv_h = 1.0 / spec.h();
  const int n = spec.n;
  int base[D];
  double frac[D];
  for (int a = 0; a < D; ++a) {
    const double u = (x[a] + 0.5 * spec.N) * inv_h - 0.5;
    const double fl = std::floor(u);
    base[a] = static_cast<int>(fl);
    frac[a] = u - fl;
    if (base[a] < -1 || base[a] >= n) return 0.0;
  }
  double sum = 0.0;
  for (int corner = 0; corner < (1 << D); ++corner) {
    double w = 1.0;
    std::size_t flat = 0;
    bool inside = true;
    for (int a = 0; a < D; ++a) {
      const int bit = (corner >> (D - 1 - a)) & 1;
      const int i = base[a] + bit;
      if (i < 0 || i >= n) { inside = false; break; }
      w *= bit ? frac[a] : 1.0 - frac[a];
      flat = flat * static_cast<std::size_t>(n) + static_cast<std::size_t>(i);
    }
    if (inside && w != 0.0) sum += w * values[flat];
  }
  return sum;
}

}  // namespace

double GridField::interpolate(const Vec& x) const {
  if (x.size() != spec_.d) throw DimensionError("point dimension does not match grid");
  if (!inside_padded_box(x)) throw OutOfBox("point lies outside the padded box");
  switch (spec_.d) {
    case 1: return interpolate_fixed<1>(values_, spec_, x);
    case 2: return interpolate_fixed<2>(values_, spec_, x);
    case 3: return interpolate_fixed<3>(values_, spec_, x);
    default: return interpolate_fixed<4>(values_, spec_, x);
  }
}

GridField GridField::sample(const GridSpec& spec, const std::function<double(const Vec&)>& fn) {
  GridField f(spec);
  for (std::size_t i = 0; i < f.size(); ++i) f.values_[i] = fn(f.cell_center(i));
  return f;
}

double measure(const GridField& f) { return f.spec().cell_volume() * pairwise_sum(f.values()); }

double l2_norm_squared(const GridField& f) {
  std::vector<double> sq(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) sq[i] = f[i] * f[i];
  return f.spec().cell_volume() * pairwise_sum(sq);
}

Spectrum::Spectrum(GridSpec spec, std::vector<std::complex<double>> coeffs)
    : spec_(spec), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != ipow(static_cast<std::size_t>(spec_.padded_n()), spec_.d))
    throw ParamError("spectrum size does not match padded grid");
}

void Spectrum::frequency_index(std::size_t flat, int* k) const {
  const int m = spec_.padded_n();
  for (int a = spec_.d - 1; a >= 0; --a) {
    const int i = static_cast<int>(flat % static_cast<std::size_t>(m));
    k[a] = i < m / 2 ? i : i - m;
    flat /= static_cast<std::size_t>(m);
  }
}

Vec Spectrum::frequency(std::size_t flat) const {
  int k[kMaxDim];
  frequency_index(flat, k);
  Vec xi(spec_.d);
  for (int a = 0; a < spec_.d; ++a) xi[a] = k[a] * spec_.freq_step();
  return xi;
}

std::vector<double> Spectrum::frequency_norms() const {
  const int m = spec_.padded_n();
  const double step = spec_.freq_step();
  std::vector<double> sq_axis(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const int s = i < m / 2 ? i : i - m;
    sq_axis[static_cast<std::size_t>(i)] = (s * step) * (s * step);
  }
  std::vector<double> out(coeffs_.size());
  for (std::size_t f = 0; f < coeffs_.size(); ++f) {
    std::size_t rem = f;
    double r2 = 0.0;
    for (int a = 0; a < spec_.d; ++a) {
      r2 += sq_axis[rem % static_cast<std::size_t>(m)];
      rem /= static_cast<std::size_t>(m);
    }
    out[f] = std::sqrt(r2);
  }
  return out;
}

std::size_t Spectrum::flat_of_frequency(const int* k) const {
  const int m = spec_.padded_n();
  std::size_t f = 0;
  for (int a = 0; a < spec_.d; ++a) {
    const int i = ((k[a] % m) + m) % m;
    f = f * static_cast<std::size_t>(m) + static_cast<std::size_t>(i);
  }
  return f;
}

double Spectrum::cell_volume() const { return std::pow(spec_.freq_step(), spec_.d); }

Spectrum forward_torus(const GridSpec& spec, std::vector<std::complex<double>> buf) {
  const int m = spec.padded_n();
  const int d = spec.d;
  fft_inplace(buf, d, m, -1);
  const auto phase = axis_phase(spec, -1.0);
  const double scale = spec.cell_volume();
  for (std::size_t p = 0; p < buf.size(); ++p) {
    std::size_t rem = p;
    std::complex<double> ph = scale;
    for (int a = 0; a < d; ++a) {
      ph *= phase[rem % static_cast<std::size_t>(m)];
      rem /= static_cast<std::size_t>(m);
    }
    buf[p] *= ph;
  }
  return Spectrum(spec, std::move(buf));
}

Spectrum forward_transform(const GridField& f) {
  const GridSpec& spec = f.spec();
  const int m = spec.padded_n();
  const int d = spec.d;
  std::vector<std::complex<double>> buf(ipow(static_cast<std::size_t>(m), d));
  int idx[kMaxDim];
  for (std::size_t i = 0; i < f.size(); ++i) {
    f.multi_index(i, idx);
    std::size_t p = 0;
    for (int a = 0; a < d; ++a) p = p * static_cast<std::size_t>(m) + static_cast<std::size_t>(idx[a]);
    buf[p] = f[i];
  }
  return forward_torus(spec, std::move(buf));
}

std::vector<std::complex<double>> inverse_torus(Spectrum s) {
  const GridSpec& spec = s.spec();
  const int m = spec.padded_n();
  const int d = spec.d;
  std::vector<std::complex<double>> buf = std::move(s.coeffs());
  const auto phase = axis_phase(spec, +1.0);
  const double scale = 1.0 / (spec.cell_volume() * static_cast<double>(buf.size()));
  for (std::size_t p = 0; p < buf.size(); ++p) {
    std::size_t rem = p;
    std::complex<double> ph = scale;
    for (int a = 0; a < d; ++a) {
      ph *= phase[rem % static_cast<std::size_t>(m)];
      rem /= static_cast<std::size_t>(m);
    }
    buf[p] *= ph;
  }
  fft_inplace(buf, d, m, +1);
  return buf;
}

GridField inverse_transform(const Spectrum& s) {
  const GridSpec& spec = s.spec();
  const int m = spec.padded_n();
  const auto buf = inverse_torus(s);
  GridField out(spec);
  int idx[kMaxDim];
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.multi_index(i, idx);
    std::size_t p = 0;
    for (int a = 0; a < spec.d; ++a) p = p * static_cast<std::size_t>(m) + static_cast<std::size_t>(idx[a]);
    out[i] = buf[p].real();
  }
  return out;
}

GridField inverse_transform_extended(const Spectrum& s) {
  const GridSpec& spec = s.spec();
  const int m = spec.padded_n();
  if ((spec.n * (spec.pad - 1)) % 2 != 0) throw ParamError("padding must keep cell centers aligned");
  const int shift = spec.n * (spec.pad - 1) / 2;
  const auto buf = inverse_torus(s);
  GridSpec ext{spec.d, spec.N * spec.pad, m, 1};
  GridField out(ext);
  int idx[kMaxDim];
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.multi_index(i, idx);
    std::size_t p = 0;
    for (int a = 0; a < spec.d; ++a) {
      const int t = ((idx[a] - shift) % m + m) % m;
      p = p * static_cast<std::size_t>(m) + static_cast<std::size_t>(t);
    }
    out[i] = buf[p].real();
  }
  return out;
}

double spectral_energy(const Spectrum& s) {
  std::vector<double> e(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) e[i] = std::norm(s.coeffs()[i]);
  return s.cell_volume() * pairwise_sum(e);
}

double annulus_mass(const Spectrum& s, double lower, double upper) {
  if (!(lower >= 0.0) || !(upper > lower))
    throw RangeError("annulus needs 0 <= lower < upper");
  if (upper > s.spec().max_frequency() * (1.0 + 1e-12))
    throw RangeError("annulus upper radius " + std::to_string(upper) +
                     " exceeds the largest resolvable frequency " +
                     std::to_string(s.spec().max_frequency()));
  const auto r = s.frequency_norms();
  std::vector<double> e(s.size(), 0.0);
  for (std::size_t i = 0; i < s.size(); ++i)
    if (r[i] >= lower && r[i] <= upper) e[i] = std::norm(s.coeffs()[i]);
  return s.cell_volume() * pairwise_sum(e);
}

std::vector<double> disjoint_annulus_masses(const Spectrum& s,
                                            const std::vector<std::pair<double, double>>& annuli) {
  for (const auto& [lo, hi] : annuli) {
    if (!(lo >= 0.0) || !(hi > lo)) throw RangeError("annulus needs 0 <= lower < upper");
    if (hi > s.spec().max_frequency() * (1.0 + 1e-12))
      throw RangeError("annulus exceeds the largest resolvable frequency");
  }
  const auto r = s.frequency_norms();
  std::vector<std::vector<double>> parts(annuli.size(), std::vector<double>(s.size(), 0.0));
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t a = 0; a < annuli.size(); ++a) {
      if (r[i] >= annuli[a].first && r[i] <= annuli[a].second) {
        parts[a][i] = std::norm(s.coeffs()[i]);
        break;
      }
    }
  }
  std::vector<double> out;
  for (const auto& p : parts) out.push_back(s.cell_volume() * pairwise_sum(p));
  return out;
}

Spectrum apply_multiplier(const Spectrum& s,
                          const std::function<std::complex<double>(const Vec&)>& fn) {
  std::vector<std::complex<double>> out(s.size());
  parallel_for(s.size(), [&](std::size_t i) { out[i] = s.coeffs()[i] * fn(s.frequency(i)); });
  return Spectrum(s.spec(), std::move(out));
}

Spectrum apply_radial_multiplier(const Spectrum& s, const std::function<double(double)>& fn) {
  const auto r = s.frequency_norms();
  std::vector<std::complex<double>> out(s.size());
  parallel_for(s.size(), [&](std::size_t i) { out[i] = s.coeffs()[i] * fn(r[i]); });
  return Spectrum(s.spec(), std::move(out));
}

MassEstimate annulus_mass_direct(const GridField& f, double lower, double upper, int samples,
                                 std::uint64_t seed) {
  if (!(lower >= 0.0) || !(upper > lower)) throw RangeError("annulus needs 0 <= lower < upper");
  if (samples < 2) throw ParamError("need at least two frequency samples");
  const GridSpec& spec = f.spec();
  const int d = spec.d;
  std::vector<Vec> support;
  std::vector<double> weight;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f[i] != 0.0) {
      support.push_back(f.cell_center(i));
      weight.push_back(f[i]);
    }
  const double ball = std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
  const double volume = ball * (std::pow(upper, d) - std::pow(lower, d));
  std::vector<double> mass(static_cast<std::size_t>(samples));
  parallel_for(static_cast<std::size_t>(samples), [&](std::size_t s) {
    auto rng = stream_engine(seed, s);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unif;
    Vec dir(d);
    for (int a = 0; a < d; ++a) dir[a] = normal(rng);
    dir /= dir.norm();
    const double u = unif(rng);
    const double r = std::pow(std::pow(lower, d) + u * (std::pow(upper, d) - std::pow(lower, d)), 1.0 / d);
    const Vec xi = r * dir;
    double re = 0.0, im = 0.0;
    for (std::size_t c = 0; c < support.size(); ++c) {
      const double a = -kTwoPi * support[c].dot(xi);
      re += weight[c] * std::cos(a);
      im += weight[c] * std::sin(a);
    }
    const double hd = spec.cell_volume();
    mass[s] = hd * hd * (re * re + im * im);
  });
  const double mean = pairwise_sum(mass) / samples;
  std::vector<double> dev(mass.size());
  for (std::size_t s = 0; s < mass.size(); ++s) dev[s] = (mass[s] - mean) * (mass[s] - mean);
  const double var = pairwise_sum(dev) / (samples - 1);
  return {volume * mean, volume * std::sqrt(var / samples), samples};
}

void write_set_binary(const GridField& indicator, const std::string& path) {
  check_little_endian();
  if (!indicator.is_indicator()) throw ParamError("only indicator fields can be written as sets");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IOError("cannot open " + path + " for writing");
  const auto& spec = indicator.spec();
  const std::uint32_t version = 1, d = static_cast<std::uint32_t>(spec.d),
                      n = static_cast<std::uint32_t>(spec.n);
  const double big_n = spec.N;
  out.write("SLAB", 4);
  out.write(reinterpret_cast<const char*>(&version), 4);
  out.write(reinterpret_cast<const char*>(&d), 4);
  out.write(reinterpret_cast<const char*>(&n), 4);
  out.write(reinterpret_cast<const char*>(&big_n), 8);
  std::vector<char> bytes(indicator.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = indicator[i] != 0.0 ? 1 : 0;
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IOError("write failed for " + path);
}

GridField read_set_binary(const std::string& path) {
  check_little_endian();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IOError("cannot open " + path);
  char magic[4];
  std::uint32_t version = 0, d = 0, n = 0;
  double big_n = 0.0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&version), 4);
  in.read(reinterpret_cast<char*>(&d), 4);
  in.read(reinterpret_cast<char*>(&n), 4);
  in.read(reinterpret_cast<char*>(&big_n), 8);
  if (!in || std::memcmp(magic, "SLAB", 4) != 0) throw IOError(path + " is not a SLAB set file");
  if (version != 1) throw IOError("unsupported set file version " + std::to_string(version));
  GridSpec spec{static_cast<int>(d), big_n, static_cast<int>(n), 2};
  spec.validate();
  GridField f(spec);
  std::vector<char> bytes(f.size());
  in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!in) throw IOError(path + " is truncated");
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    if (bytes[i] != 0 && bytes[i] != 1) throw IOError(path + " holds a non 0/1 cell");
    f[i] = bytes[i];
  }
  return f;
}

nlohmann::json set_to_json(const GridField& indicator) {
  if (!indicator.is_indicator()) throw ParamError("only indicator fields can be written as sets");
  std::vector<int> cells(indicator.size());
  for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = indicator[i] != 0.0 ? 1 : 0;
  const auto& spec = indicator.spec();
  return {{"d", spec.d}, {"n", spec.n}, {"N", spec.N}, {"cells", cells}};
}

GridField set_from_json(const nlohmann::json& j) {
  for (const char* key : {"d", "n", "N", "cells"})
    if (!j.contains(key)) throw IOError(std::string("set JSON is missing key \"") + key + "\"");
  GridSpec spec{j.at("d").get<int>(), j.at("N").get<double>(), j.at("n").get<int>(), 2};
  spec.validate();
  const auto cells = j.at("cells").get<std::vector<int>>();
  if (cells.size() != spec.cells()) throw IOError("set JSON cell count does not match n^d");
  GridField f(spec);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i] != 0 && cells[i] != 1) throw IOError("set JSON holds a non 0/1 cell");
    f[i] = cells[i];
  }
  return f;
}

GridField read_set(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IOError("cannot open " + path);
  char magic[4] = {0, 0, 0, 0};
  in.read(magic, 4);
  if (in && std::memcmp(magic, "SLAB", 4) == 0) return read_set_binary(path);
  in.clear();
  in.seekg(0);
  try {
    return set_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw IOError(path + ": " + e.what());
  }
}

}  // namespace slab
