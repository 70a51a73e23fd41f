#include "slab/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "slab/bessel.hpp"
#include "slab/errors.hpp"
#include "slab/mollifier.hpp"
#include "slab/parallel.hpp"
#include "slab/random.hpp"

namespace slab {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

LambdaGrid::LambdaGrid(double lambda0, double lambda1, std::size_t intervals, int q)
    : lambda0_(lambda0), lambda1_(lambda1), q_(q) {
  if (!(lambda0 > 0.0) || !(lambda1 >= lambda0)) throw ParamError("scale grid needs 0 < lambda0 <= lambda1");
  if (lambda0 == lambda1) intervals = 0;
  if (intervals == 0) {
    ratio_ = 1.0;
    values_ = {lambda0};
    if (lambda0 != lambda1) throw ParamError("a single scale needs lambda0 == lambda1");
    return;
  }
  ratio_ = std::pow(lambda1 / lambda0, 1.0 / static_cast<double>(intervals));
  for (std::size_t i = 0; i < intervals; ++i)
    values_.push_back(lambda0 * std::pow(lambda1 / lambda0, static_cast<double>(i) / intervals));
  values_.push_back(lambda1);
}

LambdaGrid::LambdaGrid(double lambda0, double lambda1, int q)
    : LambdaGrid(lambda0, lambda1,
                 (q >= 1 && lambda1 > lambda0 && lambda0 > 0.0)
                     ? static_cast<std::size_t>(std::ceil(std::log(lambda1 / lambda0) /
                                                          std::log(1.0 + 1.0 / q) - 1e-12))
                     : 0,
                 q) {
  if (q < 1) throw ParamError("scale grid refinement q must be >= 1");
}

LambdaGrid LambdaGrid::with_points(double lambda0, double lambda1, int points) {
  if (points < 1) throw ParamError("scale grid needs at least one point");
  return LambdaGrid(lambda0, lambda1, static_cast<std::size_t>(points - 1), 0);
}

LambdaGrid LambdaGrid::refined() const {
  return LambdaGrid(lambda0_, lambda1_, 2 * (values_.size() - 1), 2 * std::max(q_, 1));
}

MultiplierSpec MultiplierSpec::mollified(double L) {
  if (!(L >= 0.0)) throw ParamError("mollifier scale L must be >= 0");
  MultiplierSpec m;
  m.kind = Kind::mollified;
  m.L = L;
  return m;
}

MultiplierSpec MultiplierSpec::make_custom(std::function<double(double)> fn) {
  MultiplierSpec m;
  m.kind = Kind::custom;
  m.custom = std::move(fn);
  return m;
}

double MultiplierSpec::operator()(int d, double r) const {
  if (kind == Kind::custom) return custom(r);
  return 1.0 - mollifier(d).hat(L * r);
}

std::vector<double> maximal_average(const GridField& g, const NestedRule& rule,
                                    const LambdaGrid& grid, const std::vector<Vec>& xs) {
  std::vector<double> out(xs.size(), 0.0);
  parallel_for(xs.size(), [&](std::size_t i) {
    double best = 0.0;
    for (double lambda : grid.values()) best = std::max(best, abs_nested_average(g, xs[i], lambda, rule));
    out[i] = best;
  });
  return out;
}

std::vector<double> spectral_maximal(
    const Spectrum& g, const NestedRule& rule, const std::vector<double>& lambdas,
    const MultiplierSpec* multiplier,
    const std::function<void(std::size_t, const std::vector<double>&)>& per_lambda) {
  const GridSpec& spec = g.spec();
  if (spec.d != rule.dim()) throw DimensionError("spectrum and simplex dimensions differ");
  for (double l : lambdas)
    if (!(l > 0.0) || l * rule.simplex().max_vertex_norm() > 0.5 * spec.N * (spec.pad - 1) + 1e-12)
      throw OutOfBox("scale too large for the padded torus");
  const std::size_t size = g.size();
  const auto norms = g.frequency_norms();
  std::vector<std::complex<double>> base = g.coeffs();
  if (multiplier) {
    parallel_for(size, [&](std::size_t i) { base[i] *= (*multiplier)(spec.d, norms[i]); });
  }
  const bool radial = rule.j() == 1;
  const int m = spec.d - rule.j();
  std::vector<double> sup(size, 0.0);
  std::vector<double> acc(size);
  for (std::size_t l = 0; l < lambdas.size(); ++l) {
    const double lambda = lambdas[l];
    std::fill(acc.begin(), acc.end(), 0.0);
    for (const auto& node : rule.outer()) {
      std::vector<std::complex<double>> buf(size);
      if (radial) {
        const double scale = kTwoPi * lambda * node.sphere.radius;
        parallel_for(size, [&](std::size_t i) {
          buf[i] = base[i] * bessel::sphere_profile(m, scale * norms[i]);
        });
      } else {
        parallel_for(size, [&](std::size_t i) {
          buf[i] = base[i] * sphere_ft(node.sphere, lambda * g.frequency(i));
        });
      }
      const auto field = inverse_torus(Spectrum(spec, std::move(buf)));
      const double w = node.weight;
      for (std::size_t i = 0; i < size; ++i) acc[i] += w * std::abs(field[i].real());
    }
    if (per_lambda) per_lambda(l, acc);
    for (std::size_t i = 0; i < size; ++i) sup[i] = std::max(sup[i], acc[i]);
  }
  return sup;
}

double torus_norm_squared(const GridSpec& spec, const std::vector<double>& values) {
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) sq[i] = values[i] * values[i];
  return spec.cell_volume() * pairwise_sum(sq);
}

std::vector<double> mollified_maximal_subtracted(const GridField& f, const NestedRule& rule,
                                                 const std::vector<double>& lambdas, double L) {
  const GridSpec& spec = f.spec();
  const Spectrum fhat = forward_transform(f);
  auto smooth = inverse_torus(mollify(fhat, mollifier(spec.d), L));
  // f sits at torus indices [0, n) on every axis.
  const int mside = spec.padded_n();
  int idx[kMaxDim];
  for (std::size_t i = 0; i < f.size(); ++i) {
    f.multi_index(i, idx);
    std::size_t p = 0;
    for (int a = 0; a < spec.d; ++a) p = p * static_cast<std::size_t>(mside) + static_cast<std::size_t>(idx[a]);
    smooth[p] -= f[i];
  }
  for (auto& v : smooth) v = -v;
  return spectral_maximal(forward_torus(spec, std::move(smooth)), rule, lambdas);
}

std::vector<double> mollified_maximal(const GridField& f, const NestedRule& rule,
                                      const LambdaGrid& grid, const MultiplierSpec& spec,
                                      const std::vector<Vec>& xs) {
  if (spec.kind == MultiplierSpec::Kind::mollified && spec.L > grid.lambda0() * (1.0 + 1e-12))
    throw ParamError("mollifier scale L must not exceed lambda0");
  const int d = f.spec().d;
  const GridField g = inverse_transform_extended(
      apply_radial_multiplier(forward_transform(f), [&](double r) { return spec(d, r); }));
  return maximal_average(g, rule, grid, xs);
}

MaximalRatioReport l2_ratio_maximal(const std::vector<GridField>& corpus, const NestedRule& rule,
                                    const LambdaGrid& grid) {
  MaximalRatioReport report;
  report.dimension_flag = rule.dim() < rule.j() + 2;
  for (const auto& g : corpus) {
    const double denom = l2_norm_squared(g);
    if (!(denom > 0.0)) throw ParamError("corpus member has zero norm");
    const auto sup = spectral_maximal(forward_transform(g), rule, grid.values());
    const double ratio = torus_norm_squared(g.spec(), sup) / denom;
    report.ratios.push_back(ratio);
    report.max_ratio = std::max(report.max_ratio, ratio);
  }
  return report;
}

namespace {

// |sigma^|^2 and |xi . grad sigma^|^2 for one configuration sphere.
std::pair<double, double> square_terms(const ConfigSphere& cs, const Vec& xi) {
  const int m = cs.intrinsic_dim;
  const double t = kTwoPi * cs.radius * cs.perp_norm(xi);
  const double b = bessel::sphere_profile(m, t);
  const double db = bessel::sphere_profile_derivative(m, t);
  const double phase = kTwoPi * cs.center.dot(xi) * b;
  const double radial = t * db;
  return {b * b, phase * phase + radial * radial};
}

}  // namespace

SquareFunctionValues square_functions(const NestedRule& rule, const std::vector<Vec>& xis) {
  SquareFunctionValues out;
  out.I.assign(xis.size(), 0.0);
  out.I_tilde.assign(xis.size(), 0.0);
  parallel_for(xis.size(), [&](std::size_t i) {
    double a = 0.0, b = 0.0;
    for (const auto& node : rule.outer()) {
      const auto [s, g] = square_terms(node.sphere, xis[i]);
      a += node.weight * s;
      b += node.weight * g;
    }
    out.I[i] = a;
    out.I_tilde[i] = b;
  });
  return out;
}

std::vector<double> radial_square_function(const NestedRule& rule, const std::vector<double>& radii,
                                           int directions) {
  const int d = rule.dim();
  auto rng = stream_engine(0x5eed, 0);
  std::normal_distribution<double> normal;
  std::vector<Vec> dirs;
  for (int k = 0; k < directions; ++k) {
    Vec u(d);
    for (int a = 0; a < d; ++a) u[a] = normal(rng);
    dirs.push_back(u / u.norm());
  }
  std::vector<Vec> xis;
  for (double r : radii)
    for (const auto& u : dirs) xis.push_back(r * u);
  const auto values = square_functions(rule, xis);
  std::vector<double> out(radii.size(), 0.0);
  for (std::size_t i = 0; i < radii.size(); ++i) {
    double s = 0.0;
    for (int k = 0; k < directions; ++k) s += values.I[i * static_cast<std::size_t>(directions) + static_cast<std::size_t>(k)];
    out[i] = s / directions;
  }
  return out;
}

std::string EnvelopeReport::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "j,d,level,radius_lower,radius_upper,sup_square_function,sup_derivative_square_function,envelope\n";
  for (const auto& b : bins)
    out << j << ',' << d << ',' << level << ',' << b.lower << ',' << b.upper << ',' << b.sup_I << ','
        << b.sup_I_tilde << ',' << b.envelope << '\n';
  return out.str();
}

EnvelopeReport square_function_envelope(const NestedRule& rule, double r_min, double r_max,
                                        int bins, int per_bin, int directions,
                                        double growth_start) {
  if (!(r_min > 0.0 && r_max > r_min) || bins < 1 || per_bin < 1 || directions < 1)
    throw ParamError("envelope scan needs 0 < r_min < r_max and positive counts");
  const int d = rule.dim();
  EnvelopeReport report;
  report.d = d;
  report.j = rule.j();
  report.level = rule.level();
  report.growth_start = growth_start;
  auto rng = stream_engine(0x5eed, 1);
  std::normal_distribution<double> normal;
  std::vector<Vec> dirs;
  for (int k = 0; k < directions; ++k) {
    Vec u(d);
    for (int a = 0; a < d; ++a) u[a] = normal(rng);
    dirs.push_back(u / u.norm());
  }
  const double step = std::log(r_max / r_min) / bins;
  const double power = 0.5 * (d - rule.j());
  std::vector<Vec> xis;
  std::vector<double> radii;
  for (int b = 0; b < bins; ++b)
    for (int i = 0; i < per_bin; ++i) {
      const double r = r_min * std::exp(step * (b + (i + 0.5) / per_bin));
      radii.push_back(r);
      for (const auto& u : dirs) xis.push_back(r * u);
    }
  const auto values = square_functions(rule, xis);
  std::size_t at = 0;
  for (int b = 0; b < bins; ++b) {
    EnvelopeBin bin;
    bin.lower = r_min * std::exp(step * b);
    bin.upper = r_min * std::exp(step * (b + 1));
    for (int i = 0; i < per_bin; ++i) {
      const double r = radii[static_cast<std::size_t>(b * per_bin + i)];
      for (int k = 0; k < directions; ++k, ++at) {
        bin.sup_I = std::max(bin.sup_I, values.I[at]);
        bin.sup_I_tilde = std::max(bin.sup_I_tilde, values.I_tilde[at]);
        bin.envelope = std::max(bin.envelope, values.I[at] * std::pow(1.0 + r, power));
      }
    }
    report.envelope_constant = std::max(report.envelope_constant, bin.envelope);
    report.tilde_constant = std::max(report.tilde_constant, bin.sup_I_tilde);
    report.bins.push_back(bin);
  }
  const double growth_end = 100.0 * growth_start;
  int compared = 0;
  bool grows = true;
  for (std::size_t b = 1; b < report.bins.size(); ++b) {
    if (report.bins[b - 1].lower < growth_start || report.bins[b].upper > growth_end * (1.0 + 1e-9)) continue;
    ++compared;
    grows = grows && report.bins[b].sup_I_tilde > report.bins[b - 1].sup_I_tilde;
  }
  report.tilde_grows = grows && compared > 0;
  return report;
}

std::string Thm61Report::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "j,d,L,lambda0,lambda1,ratio,bound,pass\n";
  for (const auto& r : rows)
    out << j << ',' << d << ',' << r.L << ',' << lambda0 << ',' << lambda1 << ',' << r.ratio << ','
        << r.bound << ',' << (r.pass ? 1 : 0) << '\n';
  return out.str();
}

Thm61Report thm61_scaling(const std::vector<GridField>& corpus, const NestedRule& rule,
                          const LambdaGrid& grid, const std::vector<double>& Ls) {
  if (corpus.empty() || Ls.empty()) throw ParamError("scaling run needs a corpus and an L sweep");
  Thm61Report report;
  report.d = rule.dim();
  report.j = rule.j();
  report.lambda0 = grid.lambda0();
  report.lambda1 = grid.lambda1();
  for (double L : Ls)
    if (!(L > 0.0) || L > grid.lambda0() * (1.0 + 1e-12)) throw ParamError("every L must lie in (0, lambda0]");
  const auto& lambdas = grid.values();
  std::vector<std::size_t> octave(lambdas.size());
  std::size_t octaves = 1;
  for (std::size_t l = 0; l < lambdas.size(); ++l) {
    const double o = std::floor(std::log2(lambdas[l] / grid.lambda0()) + 1e-9);
    octave[l] = static_cast<std::size_t>(std::max(0.0, o));
    octaves = std::max(octaves, octave[l] + 1);
  }
  // The top endpoint of a whole number of octaves belongs to the last one.
  if (octaves > 1 && octave.back() == octaves - 1 && std::count(octave.begin(), octave.end(), octaves - 1) == 1) {
    octave.back() = octaves - 2;
    --octaves;
  }
  for (double L : Ls) {
    Thm61Row row;
    row.L = L;
    row.relative_L = L / grid.lambda0();
    row.octave_ratios.assign(octaves, 0.0);
    const MultiplierSpec mult = MultiplierSpec::mollified(L);
    for (const auto& f : corpus) {
      const double denom = l2_norm_squared(f);
      if (!(denom > 0.0)) throw ParamError("corpus member has zero norm");
      const std::size_t size = forward_transform(f).size();
      std::vector<std::vector<double>> per_octave(octaves, std::vector<double>(size, 0.0));
      const auto sup = spectral_maximal(forward_transform(f), rule, lambdas, &mult,
                                        [&](std::size_t l, const std::vector<double>& acc) {
                                          auto& o = per_octave[octave[l]];
                                          for (std::size_t i = 0; i < size; ++i) o[i] = std::max(o[i], acc[i]);
                                        });
      row.ratio = std::max(row.ratio, torus_norm_squared(f.spec(), sup) / denom);
      for (std::size_t o = 0; o < octaves; ++o)
        row.octave_ratios[o] = std::max(row.octave_ratios[o], torus_norm_squared(f.spec(), per_octave[o]) / denom);
    }
    report.rows.push_back(row);
  }
  std::size_t top = 0;
  for (std::size_t r = 0; r < report.rows.size(); ++r)
    if (report.rows[r].L > report.rows[top].L) top = r;
  report.constant = report.rows[top].ratio / std::cbrt(report.rows[top].relative_L);
  report.pass = true;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (auto& r : report.rows) {
    r.bound = report.constant * std::cbrt(r.relative_L);
    r.pass = r.ratio <= r.bound * (1.0 + 1e-12);
    report.pass = report.pass && r.pass;
    if (r.ratio > 0.0) {
      const double x = std::log(r.relative_L), y = std::log(r.ratio);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++count;
    }
  }
  if (count >= 2) report.slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  return report;
}

}  // namespace slab
