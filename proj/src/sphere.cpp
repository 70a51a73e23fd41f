#include "slab/sphere.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>

#include "slab/bessel.hpp"
#include "slab/errors.hpp"

namespace slab {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Mat orthonormal_complement(const std::vector<Vec>& span, int d) {
  const int k = static_cast<int>(span.size());
  if (k == 0) return Mat::Identity(d, d);
  Mat y(d, k);
  for (int i = 0; i < k; ++i) y.col(i) = span[static_cast<std::size_t>(i)];
  Eigen::HouseholderQR<Mat> qr(y);
  const Mat q = qr.householderQ() * Mat::Identity(d, d);
  return q.rightCols(d - k);
}

}  // namespace

double ConfigSphere::perp_norm(const Vec& xi) const {
  return (complement_basis.transpose() * xi).norm();
}

ConfigSphere config_sphere(const Simplex& s, int j, const Frame& frame) {
  if (j < 1 || j > s.k()) throw DimensionError("configuration index j must be in [1, k]");
  if (frame.size() != j - 1) throw DimensionError("frame must hold j - 1 vectors");
  const int d = s.dim();
  const Vec& vj = s.vertex(j - 1);
  ConfigSphere cs;
  cs.intrinsic_dim = d - j;
  cs.center = Vec::Zero(d);
  if (j > 1) {
    const int c = j - 1;
    const Mat g = frame.gram();
    Vec rhs(c);
    for (int i = 0; i < c; ++i) {
      const Vec& yi = frame.vectors[static_cast<std::size_t>(i)];
      const Vec& vi = s.vertex(i);
      rhs[i] = 0.5 * (vj.squaredNorm() + yi.squaredNorm() - (vj - vi).squaredNorm());
    }
    const Vec coeffs = g.ldlt().solve(rhs);
    for (int i = 0; i < c; ++i) cs.center += coeffs[i] * frame.vectors[static_cast<std::size_t>(i)];
  }
  const double r2 = vj.squaredNorm() - cs.center.squaredNorm();
  if (!(r2 > kGramTolerance))
    throw DegenerateConfig("configuration sphere radius^2 = " + std::to_string(r2));
  cs.radius = std::sqrt(r2);
  cs.complement_basis = orthonormal_complement(frame.vectors, d);
  return cs;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[static_cast<std::size_t>(i)] = -x;
    nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    weights[static_cast<std::size_t>(i)] = w;
    weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
}

namespace {

UnitSphereRule build_unit_rule(int m, int level) {
  UnitSphereRule rule;
  rule.m = m;
  const int base = 1 << level;
  if (m == 1) {
    const int n = 8 * base;
    for (int i = 0; i < n; ++i) {
      const double a = kTwoPi * i / n;
      Vec p(2);
      p << std::cos(a), std::sin(a);
      rule.points.push_back(p);
      rule.weights.push_back(1.0 / n);
    }
    return rule;
  }
  if (m == 2) {
    std::vector<double> t, wt;
    gauss_legendre(base, t, wt);
    const int naz = 2 * base;
    for (std::size_t a = 0; a < t.size(); ++a) {
      const double s = std::sqrt(std::max(0.0, 1.0 - t[a] * t[a]));
      for (int b = 0; b < naz; ++b) {
        const double phi = kTwoPi * (b + 0.5 * (a % 2)) / naz;
        Vec p(3);
        p << s * std::cos(phi), s * std::sin(phi), t[a];
        rule.points.push_back(p);
        rule.weights.push_back(0.5 * wt[a] / naz);
      }
    }
    return rule;
  }
  if (m == 3) {
    // Polar coordinate t = x_4 has density (2/pi) sqrt(1 - t^2) on [-1, 1].
    const UnitSphereRule& inner = unit_sphere_rule(2, level);
    const int n = base;
    for (int kk = 1; kk <= n; ++kk) {
      const double theta = std::numbers::pi * kk / (n + 1);
      const double t = std::cos(theta);
      const double s = std::sin(theta);
      const double w = (std::numbers::pi / (n + 1)) * s * s * (2.0 / std::numbers::pi);
      for (std::size_t q = 0; q < inner.points.size(); ++q) {
        Vec p(4);
        p.head(3) = s * inner.points[q];
        p[3] = t;
        rule.points.push_back(p);
        rule.weights.push_back(w * inner.weights[q]);
      }
    }
    return rule;
  }
  throw DimensionError("unit sphere rules exist for m = 1, 2, 3");
}

}  // namespace

const UnitSphereRule& unit_sphere_rule(int m, int level) {
  if (level < 1 || level > 12) throw ParamError("quadrature level must be in [1, 12]");
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<UnitSphereRule>> cache;
  {
    std::lock_guard lock(mutex);
    auto it = cache.find({m, level});
    if (it != cache.end()) return *it->second;
  }
  auto rule = std::make_unique<UnitSphereRule>(build_unit_rule(m, level));
  std::lock_guard lock(mutex);
  auto [it, inserted] = cache.emplace(std::make_pair(m, level), std::move(rule));
  return *it->second;
}

SphereRule sphere_rule(const ConfigSphere& cs, int level) {
  const UnitSphereRule& unit = unit_sphere_rule(cs.intrinsic_dim, level);
  SphereRule rule;
  rule.nodes.reserve(unit.points.size());
  for (const auto& p : unit.points) rule.nodes.push_back(place_on_sphere(cs, p));
  rule.weights = unit.weights;
  return rule;
}

std::complex<double> sphere_ft(const ConfigSphere& cs, const Vec& xi) {
  const double phase = -kTwoPi * cs.center.dot(xi);
  const double t = kTwoPi * cs.radius * cs.perp_norm(xi);
  const double b = bessel::sphere_profile(cs.intrinsic_dim, t);
  return {b * std::cos(phase), b * std::sin(phase)};
}

std::vector<std::complex<double>> sphere_ft_gradient(const ConfigSphere& cs, const Vec& xi) {
  const int d = cs.ambient_dim();
  const std::complex<double> e = std::polar(1.0, -kTwoPi * cs.center.dot(xi));
  const Vec perp = cs.complement_basis * (cs.complement_basis.transpose() * xi);
  const double pn = perp.norm();
  const double t = kTwoPi * cs.radius * pn;
  const double b = bessel::sphere_profile(cs.intrinsic_dim, t);
  const double db = bessel::sphere_profile_derivative(cs.intrinsic_dim, t);
  std::vector<std::complex<double>> grad(static_cast<std::size_t>(d));
  const std::complex<double> i(0.0, 1.0);
  for (int a = 0; a < d; ++a) {
    std::complex<double> g = -i * kTwoPi * cs.center[a] * b;
    if (pn > 0.0) g += db * kTwoPi * cs.radius * perp[a] / pn;
    grad[static_cast<std::size_t>(a)] = e * g;
  }
  return grad;
}

std::complex<double> sphere_ft_quadrature(const ConfigSphere& cs, const Vec& xi, int level) {
  const SphereRule rule = sphere_rule(cs, level);
  double re = 0.0, im = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double a = -kTwoPi * rule.nodes[q].dot(xi);
    re += rule.weights[q] * std::cos(a);
    im += rule.weights[q] * std::sin(a);
  }
  return {re, im};
}

std::string DecayReport::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "R,sup_ft,sup_grad_ft,envelope_ratio\n";
  for (const auto& r : rows)
    out << r.radius << ',' << r.sup_ft << ',' << r.sup_grad_ft << ',' << r.envelope_ratio << '\n';
  return out.str();
}

DecayReport decay_envelope_check(const ConfigSphere& cs, const std::vector<double>& radii,
                                 int samples_per_radius, std::uint64_t seed,
                                 double growth_tolerance) {
  const int d = cs.ambient_dim();
  const int m = cs.intrinsic_dim;
  const int span_dim = d - (m + 1);
  Mat span_basis;
  if (span_dim > 0) {
    // The frame span is the orthogonal complement of the complement basis.
    Eigen::HouseholderQR<Mat> qr(cs.complement_basis);
    const Mat q = qr.householderQ() * Mat::Identity(d, d);
    span_basis = q.rightCols(span_dim);
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  DecayReport report;
  for (double r : radii) {
    DecayRow row{r, 0.0, 0.0, 0.0};
    for (int s = 0; s < samples_per_radius; ++s) {
      Vec u(m + 1);
      for (int c = 0; c <= m; ++c) u[c] = normal(rng);
      u /= u.norm();
      Vec xi = r * (cs.complement_basis * u);
      for (int c = 0; c < span_dim; ++c) xi += (1.0 + r) * normal(rng) * span_basis.col(c);
      row.sup_ft = std::max(row.sup_ft, std::abs(sphere_ft(cs, xi)));
      double g2 = 0.0;
      for (const auto& g : sphere_ft_gradient(cs, xi)) g2 += std::norm(g);
      row.sup_grad_ft = std::max(row.sup_grad_ft, std::sqrt(g2));
    }
    row.envelope_ratio = (row.sup_ft + row.sup_grad_ft) * std::pow(1.0 + r, 0.5 * m);
    report.rows.push_back(row);
  }
  const std::size_t half = (report.rows.size() + 1) / 2;
  double late = 0.0;
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const double e = report.rows[i].envelope_ratio;
    report.envelope_constant = std::max(report.envelope_constant, e);
    if (i < half) report.fitted_constant = std::max(report.fitted_constant, e);
    else late = std::max(late, e);
  }
  report.grows = late > report.fitted_constant * (1.0 + growth_tolerance);
  return report;
}

}  // namespace slab
