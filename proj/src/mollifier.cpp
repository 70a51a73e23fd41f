#include "slab/mollifier.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "slab/bessel.hpp"
#include "slab/errors.hpp"

namespace slab {
namespace {

constexpr double kBumpSharpness = 2.0;
constexpr double kSecondScale = 1.25;
constexpr double kPsiStep = 1.0 / 128.0;
constexpr double kMaxRadius = 96.0;
constexpr double kNegligible = 1e-14;
constexpr int kHatIntervals = 1024;

double bump(double r) {
  const double u = 4.0 * r * r;
  if (u >= 1.0) return 0.0;
  return std::exp(-kBumpSharpness / (1.0 - u));
}

double sphere_area(int d) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

double ball_volume(int d) { return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0); }

struct Quadrature {
  std::vector<double> x, w;
};

// Gauss-Legendre rule mapped to [a, b].
Quadrature mapped_rule(int n, double a, double b) {
  Quadrature q;
  gauss_legendre(n, q.x, q.w);
  for (std::size_t i = 0; i < q.x.size(); ++i) {
    q.x[i] = 0.5 * (a + b) + 0.5 * (b - a) * q.x[i];
    q.w[i] *= 0.5 * (b - a);
  }
  return q;
}

// Four-point Lagrange interpolation on a uniform table starting at 0.
double cubic(const std::vector<double>& table, double step, double r) {
  const double u = r / step;
  const auto last = static_cast<std::ptrdiff_t>(table.size()) - 1;
  auto i = static_cast<std::ptrdiff_t>(std::floor(u)) - 1;
  i = std::clamp<std::ptrdiff_t>(i, 0, std::max<std::ptrdiff_t>(last - 3, 0));
  const double t = u - static_cast<double>(i);
  const double f0 = table[static_cast<std::size_t>(i)], f1 = table[static_cast<std::size_t>(i + 1)],
               f2 = table[static_cast<std::size_t>(i + 2)], f3 = table[static_cast<std::size_t>(i + 3)];
  return f0 * (t - 1) * (t - 2) * (t - 3) / -6.0 + f1 * t * (t - 2) * (t - 3) / 2.0 +
         f2 * t * (t - 1) * (t - 3) / -2.0 + f3 * t * (t - 1) * (t - 2) / 6.0;
}

double cubic_derivative(const std::vector<double>& table, double step, double r) {
  const double u = r / step;
  const auto last = static_cast<std::ptrdiff_t>(table.size()) - 1;
  auto i = static_cast<std::ptrdiff_t>(std::floor(u)) - 1;
  i = std::clamp<std::ptrdiff_t>(i, 0, std::max<std::ptrdiff_t>(last - 3, 0));
  const double t = u - static_cast<double>(i);
  const double f0 = table[static_cast<std::size_t>(i)], f1 = table[static_cast<std::size_t>(i + 1)],
               f2 = table[static_cast<std::size_t>(i + 2)], f3 = table[static_cast<std::size_t>(i + 3)];
  const double d0 = -((t - 2) * (t - 3) + (t - 1) * (t - 3) + (t - 1) * (t - 2)) / 6.0;
  const double d1 = ((t - 2) * (t - 3) + t * (t - 3) + t * (t - 2)) / 2.0;
  const double d2 = -((t - 1) * (t - 3) + t * (t - 3) + t * (t - 1)) / 2.0;
  const double d3 = ((t - 1) * (t - 2) + t * (t - 2) + t * (t - 1)) / 6.0;
  return (f0 * d0 + f1 * d1 + f2 * d2 + f3 * d3) / step;
}

// phi(r) = 2 pi r^{1 - d/2} int chi(rho) J_{d/2-1}(2 pi r rho) rho^{d/2} d rho.
// Node weights times chi(rho) rho^{d/2} are precomputed in `weighted`.
double inverse_radial(int d, const Quadrature& q, const std::vector<double>& weighted, double r) {
  double sum = 0.0;
  if (r == 0.0) {
    for (std::size_t i = 0; i < q.x.size(); ++i) sum += weighted[i] * std::pow(q.x[i], 0.5 * d - 1.0);
    return sphere_area(d) * sum;
  }
  const double w = 2.0 * std::numbers::pi * r;
  for (std::size_t i = 0; i < q.x.size(); ++i) {
    const double z = w * q.x[i];
    double j;
    if (d == 3) j = std::sqrt(2.0 / (std::numbers::pi * z)) * std::sin(z);
    else j = bessel::jn(d / 2 - 1, z);
    sum += weighted[i] * j;
  }
  return w * std::pow(r, -0.5 * d) * sum;
}

// (chi * chi)(rho) in R^d, in polar coordinates around the axis of xi.
struct ConvolutionRule {
  Quadrature radial, polar;
  std::vector<double> radial_weight, polar_weight, cosines;

  ConvolutionRule(int d, int n) : radial(mapped_rule(n, 0.0, 0.5)), polar(mapped_rule(n, 0.0, std::numbers::pi)) {
    const double cap = d == 2 ? 2.0 : sphere_area(d - 1);
    for (std::size_t i = 0; i < radial.x.size(); ++i)
      radial_weight.push_back(cap * radial.w[i] * bump(radial.x[i]) * std::pow(radial.x[i], d - 1));
    for (std::size_t a = 0; a < polar.x.size(); ++a) {
      polar_weight.push_back(polar.w[a] * std::pow(std::sin(polar.x[a]), d - 2));
      cosines.push_back(std::cos(polar.x[a]));
    }
  }

  double operator()(double rho) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < radial.x.size(); ++i) {
      const double r = radial.x[i];
      double inner = 0.0;
      for (std::size_t a = 0; a < polar.x.size(); ++a) {
        const double dist2 = rho * rho + r * r - 2.0 * rho * r * cosines[a];
        inner += polar_weight[a] * bump(std::sqrt(std::max(0.0, dist2)));
      }
      sum += radial_weight[i] * inner;
    }
    return sum;
  }
};

}  // namespace

Mollifier::Mollifier(int d) : d_(d), step_(kPsiStep), hat_step_(1.0 / kHatIntervals) {
  if (d < 2 || d > 4) throw DimensionError("mollifier dimension must be in [2, 4]");
  const Quadrature q = mapped_rule(256, 0.0, 0.5);

  const auto count = static_cast<std::size_t>(kMaxRadius / step_) + 1;
  std::vector<double> weighted(q.x.size());
  for (std::size_t i = 0; i < q.x.size(); ++i) weighted[i] = q.w[i] * bump(q.x[i]) * std::pow(q.x[i], 0.5 * d);
  std::vector<double> phi(count);
  for (std::size_t i = 0; i < count; ++i) phi[i] = inverse_radial(d, q, weighted, static_cast<double>(i) * step_);

  // int phi^2 = int chi^2 by Plancherel.
  double chi_sq = 0.0;
  for (std::size_t i = 0; i < q.x.size(); ++i)
    chi_sq += q.w[i] * bump(q.x[i]) * bump(q.x[i]) * std::pow(q.x[i], d - 1);
  chi_sq *= sphere_area(d);
  const double scale_pow = std::pow(kSecondScale, d);
  const double norm = chi_sq * (1.0 + scale_pow);

  std::vector<double> psi(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double r = static_cast<double>(i) * step_;
    const double outer = cubic(phi, step_, r / kSecondScale);
    psi[i] = (phi[i] * phi[i] + outer * outer) / norm;
  }
  std::size_t cut = count;
  // Trim where psi and its radial mass density are both negligible.
  while (cut > 1) {
    const double r = static_cast<double>(cut - 1) * step_;
    if (std::abs(psi[cut - 1]) * std::max(1.0, std::pow(r, d - 1)) >= kNegligible) break;
    --cut;
  }
  if (cut == count) throw Error("mollifier does not decay below 1e-14 inside the table");
  cut = std::min(count, cut + 4);
  psi.resize(cut);
  for (double v : psi)
    if (!(v > 0.0)) throw Error("mollifier lost positivity on its tabulated range");
  radius_ = static_cast<double>(cut - 1) * step_;
  psi_table_ = std::move(psi);

  const ConvolutionRule self_convolution(d, 96);
  std::vector<double> conv(kHatIntervals + 1);
  for (int i = 0; i <= kHatIntervals; ++i) conv[static_cast<std::size_t>(i)] = self_convolution(i * hat_step_);
  const double c0 = conv[0];
  hat_table_.resize(conv.size());
  for (std::size_t i = 0; i < conv.size(); ++i) {
    const double r = static_cast<double>(i) * hat_step_;
    const double inner = r * kSecondScale < 1.0 ? cubic(conv, hat_step_, r * kSecondScale) : 0.0;
    hat_table_[i] = std::clamp((conv[i] + scale_pow * inner) / (c0 * (1.0 + scale_pow)), 0.0, 1.0);
  }
  hat_table_[0] = 1.0;
  hat_table_.back() = 0.0;
}

double Mollifier::hat(double r) const {
  if (r <= 0.0) return 1.0;
  if (r >= 1.0) return 0.0;
  return std::clamp(cubic(hat_table_, hat_step_, r), 0.0, 1.0);
}

double Mollifier::psi(double r) const {
  r = std::abs(r);
  if (r >= radius_) return 0.0;
  return cubic(psi_table_, step_, r);
}

double Mollifier::psi_derivative(double r) const {
  if (r >= radius_) return 0.0;
  return cubic_derivative(psi_table_, step_, std::abs(r));
}

double Mollifier::psi_t(double t, const Vec& x) const {
  if (!(t > 0.0)) throw ParamError("mollifier scale must be positive");
  return std::pow(t, -d_) * psi(x.norm() / t);
}

namespace {

// Composite Gauss rule over [a, b] with unit-width-ish panels.
template <typename F>
double composite(double a, double b, double panel, F&& fn) {
  if (!(b > a)) return 0.0;
  const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / panel)));
  static const Quadrature base = mapped_rule(8, 0.0, 1.0);
  const double width = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    double part = 0.0;
    for (std::size_t i = 0; i < base.x.size(); ++i) part += base.w[i] * fn(a + (p + base.x[i]) * width);
    sum += part * width;
  }
  return sum;
}

}  // namespace

double Mollifier::integral() const { return tail_integral(0.0); }

double Mollifier::tail_integral(double r) const {
  if (r >= radius_) return 0.0;
  const int d = d_;
  return sphere_area(d) *
         composite(std::max(r, 0.0), radius_, 8 * step_, [&](double s) { return psi(s) * std::pow(s, d - 1); });
}

double Mollifier::shift_modulus(double a) const {
  if (a == 0.0) return 0.0;
  a = std::abs(a);
  const int d = d_;
  const double cap = d == 2 ? 2.0 : sphere_area(d - 1);
  const double r = radius_;
  return cap * composite(-r, r + a, 0.25, [&](double x1) {
    return composite(0.0, r, 0.25, [&](double rho) {
      const double p0 = psi(std::hypot(x1, rho));
      const double p1 = psi(std::hypot(x1 - a, rho));
      return std::abs(p1 - p0) * std::pow(rho, d - 2);
    });
  });
}

double Mollifier::gradient_l1() const {
  const int d = d_;
  const double radial = composite(0.0, radius_, 8 * step_, [&](double s) {
    return std::abs(psi_derivative(s)) * std::pow(s, d - 1);
  });
  return 2.0 * ball_volume(d - 1) * radial;
}

double Mollifier::hat_slope_constant() const {
  double best = 0.0;
  const int n = 1 << 14;
  for (int i = 1; i < n; ++i) {
    const double r = static_cast<double>(i) / n;
    best = std::max(best, std::abs(1.0 - hat(r)) / r);
  }
  return best;
}

const Mollifier& mollifier(int d) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<Mollifier>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[d];
  if (!slot) slot = std::make_unique<Mollifier>(d);
  return *slot;
}

Spectrum mollify(const Spectrum& s, const Mollifier& m, double t) {
  return apply_radial_multiplier(s, [&](double r) { return m.hat(t * r); });
}

GridField mollify(const GridField& f, const Mollifier& m, double t) {
  return inverse_transform(mollify(forward_transform(f), m, t));
}

HatDeviationReport hat_deviation_bound(const Mollifier& m, double t,
                                       const std::vector<double>& frequencies, double constant) {
  HatDeviationReport report;
  report.constant = constant;
  for (double xi : frequencies) {
    const double r = t * std::abs(xi);
    if (r == 0.0) continue;
    report.sup_ratio = std::max(report.sup_ratio, std::abs(1.0 - m.hat(r)) / std::min(1.0, r));
  }
  report.exceeds = report.sup_ratio > constant;
  return report;
}

TailShiftReport tail_and_shift_bounds(const Mollifier& m, double eta, double t, double lambda,
                                      const ConfigSphere& cs) {
  if (!(eta > 0.0 && eta < 1.0)) throw PreconditionError("eta must lie in (0, 1)");
  if (!(t > 0.0)) throw PreconditionError("mollifier scale must be positive");
  if (t < lambda / eta * (1.0 - 1e-12))
    throw PreconditionError("shift bound needs t >= lambda / eta");
  TailShiftReport report;
  // Scaling x -> t x turns both integrals into statements about psi itself.
  report.tail = m.tail_integral(1.0 / eta);
  report.tail_ratio = report.tail / eta;
  // Every point of the configuration sphere has norm |v_j|, and the L1 shift
  // modulus of a radial function depends only on the shift length.
  report.vertex_norm = std::sqrt(cs.center.squaredNorm() + cs.radius * cs.radius);
  report.shift = m.shift_modulus(lambda * report.vertex_norm / t);
  report.shift_ratio = report.shift / eta;
  return report;
}

}  // namespace slab
