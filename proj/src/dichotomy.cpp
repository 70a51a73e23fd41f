#include "slab/dichotomy.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "slab/corpus.hpp"
#include "slab/errors.hpp"
#include "slab/maximal.hpp"
#include "slab/mollifier.hpp"
#include "slab/parallel.hpp"
#include "slab/rotation.hpp"

namespace slab {

std::string to_string(Branch b) {
  switch (b) {
    case Branch::count: return "count";
    case Branch::fourier: return "fourier";
    case Branch::both: return "both";
    case Branch::indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

namespace {

Branch resolve(bool count_ok, bool fourier_ok) {
  if (count_ok && fourier_ok) return Branch::both;
  if (count_ok) return Branch::count;
  if (fourier_ok) return Branch::fourier;
  return Branch::indeterminate;
}

void check_common(const GridField& a, const DichotomyParams& p, const DichotomyLimits& limits,
                  double exponent, double largest_scale, double smallest_scale) {
  if (!a.is_indicator()) throw ParamError("dichotomy needs an indicator set");
  if (measure(a) == 0.0) throw ParamError("dichotomy needs a nonempty set");
  if (!(p.eps > 0.0 && p.eps < 1.0)) throw ParamError("eps must lie in (0, 1)");
  if (!(p.eta > 0.0 && p.eta < 1.0)) throw ParamError("eta must lie in (0, 1)");
  const double n_box = a.spec().N;
  if (smallest_scale < 1.0) throw ParamError("scales must be >= 1");
  if (largest_scale > std::pow(p.eta, 4) * n_box * (1.0 + 1e-12))
    throw ParamError("scale exceeds eta^4 N = " + std::to_string(std::pow(p.eta, 4) * n_box));
  if (p.eta > limits.eta_constant * std::pow(p.eps, exponent) * (1.0 + 1e-12))
    throw ParamError(exponent == 3.0 ? "eta exceeds the calibrated limit c_cal eps^3"
                                      : "eta exceeds the calibrated limit c_cal eps^(5/2)");
  if (n_box < limits.box_constant * std::pow(p.eta, -4) * (1.0 - 1e-12))
    throw ParamError("box side below the calibrated limit C_cal eta^-4");
}

}  // namespace

nlohmann::json DichotomyReport::to_json() const {
  nlohmann::json j{{"mode", mode},
                   {"branch", to_string(branch)},
                   {"d", d},
                   {"k", k},
                   {"delta", delta},
                   {"eps", params.eps},
                   {"eta", params.eta},
                   {"count_term", count_term},
                   {"count_stderr", count_stderr},
                   {"threshold", threshold},
                   {"annulus", {annulus_lower, annulus_upper}},
                   {"annulus_mass_ratio", annulus_mass_ratio},
                   {"calibrated_floor", calibrated_floor},
                   {"level", level},
                   {"seed", seed}};
  if (mode == "pinned") {
    j["lambda0"] = params.lambda0;
    j["lambda1"] = params.lambda1;
    j["candidates_tried"] = candidates_tried;
    if (witness) {
      j["witness"] = std::vector<double>(witness->data(), witness->data() + witness->size());
      j["witness_probabilities"] = witness_probabilities;
    } else {
      j["witness"] = nullptr;
    }
  } else {
    j["lambda"] = params.lambda;
  }
  return j;
}

double annulus_mass_ratio(const GridField& a, const Spectrum& s, double lower, double upper) {
  return annulus_mass(s, lower, upper) / measure(a);
}

DichotomyReport check_unpinned(const GridField& a, const Simplex& s, const DichotomyParams& p,
                               const DichotomyLimits& limits, int level, std::uint64_t seed,
                               int count_samples) {
  if (s.dim() != a.spec().d) throw DimensionError("simplex and set dimensions differ");
  check_common(a, p, limits, 2.5, p.lambda, p.lambda);
  DichotomyReport r;
  r.mode = "unpinned";
  r.d = s.dim();
  r.k = s.k();
  r.params = p;
  r.level = level;
  r.seed = seed;
  r.delta = density(a);
  r.threshold = std::pow(r.delta, r.k + 1) - p.eps;
  r.annulus_lower = p.eta * p.eta / p.lambda;
  r.annulus_upper = 1.0 / (p.eta * p.eta * p.lambda);
  r.annulus_mass_ratio = annulus_mass_ratio(a, forward_transform(a), r.annulus_lower, r.annulus_upper);
  r.calibrated_floor = limits.floor_constant * p.eps * p.eps;
  const NestedRule rule(s, s.k(), level);
  const Estimate count = count_functional(a, p.lambda, rule, count_samples, seed);
  r.count_term = count.value / a.spec().box_volume();
  r.count_stderr = count.stderr_ / a.spec().box_volume();
  r.branch = resolve(r.count_term > r.threshold, r.annulus_mass_ratio >= r.calibrated_floor);
  return r;
}

DichotomyReport check_pinned(const GridField& a, const Simplex& s, const DichotomyParams& p,
                             const DichotomyLimits& limits, int level, std::uint64_t seed,
                             const PinnedOptions& options) {
  if (s.dim() != a.spec().d) throw DimensionError("simplex and set dimensions differ");
  if (!(p.lambda1 >= p.lambda0)) throw ParamError("pinned scales need lambda0 <= lambda1");
  check_common(a, p, limits, 3.0, p.lambda1, p.lambda0);
  DichotomyReport r;
  r.mode = "pinned";
  r.d = s.dim();
  r.k = s.k();
  r.params = p;
  r.level = level;
  r.seed = seed;
  r.delta = density(a);
  r.threshold = std::pow(r.delta, r.k) - p.eps;
  r.annulus_lower = p.eta * p.eta / p.lambda1;
  r.annulus_upper = 1.0 / (p.eta * p.eta * p.lambda0);
  r.annulus_mass_ratio = annulus_mass_ratio(a, forward_transform(a), r.annulus_lower, r.annulus_upper);
  r.calibrated_floor = limits.floor_constant * p.eps * p.eps;

  const LambdaGrid grid = p.lambda0 == p.lambda1 ? LambdaGrid(p.lambda0, p.lambda1)
                                                 : LambdaGrid::with_points(p.lambda0, p.lambda1, options.grid_points);
  std::vector<std::size_t> cells;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != 0.0) cells.push_back(i);
  std::mt19937_64 rng(seed);
  const std::size_t tries = std::min(cells.size(), static_cast<std::size_t>(std::max(options.candidates, 0)));
  double best = -1.0;
  for (std::size_t c = 0; c < tries; ++c) {
    // Partial Fisher-Yates: candidates without replacement.
    std::uniform_int_distribution<std::size_t> pick(c, cells.size() - 1);
    std::swap(cells[c], cells[pick(rng)]);
    const Vec x = a.cell_center(cells[c]);
    HaarSampler sampler(r.d, seed);
    const auto probs = pin_probability_sweep(a, x, grid.values(), s, options.draws, sampler);
    double worst = 1.0;
    for (const auto& pp : probs) worst = std::min(worst, pp.estimate);
    ++r.candidates_tried;
    if (worst > best) {
      best = worst;
      r.count_stderr = std::sqrt(worst * (1.0 - worst) / options.draws);
    }
    if (worst > r.threshold) {
      r.witness = x;
      for (const auto& pp : probs) r.witness_probabilities.push_back(pp.estimate);
      break;
    }
  }
  r.count_term = std::max(best, 0.0);
  r.branch = resolve(r.witness.has_value(), r.annulus_mass_ratio >= r.calibrated_floor);
  return r;
}

Lemma41Report lemma41_check(const GridField& a, double eta, double lambda, int k) {
  if (!a.is_indicator() || measure(a) == 0.0) throw ParamError("lemma check needs a nonempty indicator");
  if (k < 1) throw ParamError("k must be >= 1");
  Lemma41Report r;
  r.delta = density(a);
  r.eta = eta;
  r.lambda = lambda;
  r.k = k;
  if (!(eta > 0.0) || eta > r.delta / 10.0 * (1.0 + 1e-12)) throw ParamError("eta must satisfy 0 < eta <= delta / 10");
  if (!(lambda > 0.0) || lambda > std::pow(eta, 4) * a.spec().N * (1.0 + 1e-12))
    throw ParamError("lambda must satisfy 0 < lambda <= eta^4 N");
  const Mollifier& m = mollifier(a.spec().d);
  const double t = lambda / eta;
  const Spectrum fhat = forward_transform(a);
  const auto norms = fhat.frequency_norms();
  // Termwise sums: |f^|^2 h >= |f^|^2 h^2 because 0 <= h <= 1.
  std::vector<double> cross(fhat.size()), self(fhat.size());
  for (std::size_t i = 0; i < fhat.size(); ++i) {
    const double e = std::norm(fhat.coeffs()[i]);
    const double h = m.hat(t * norms[i]);
    cross[i] = e * h;
    self[i] = e * (h * h);
  }
  r.f_f1 = fhat.cell_volume() * pairwise_sum(cross);
  r.f1_f1 = fhat.cell_volume() * pairwise_sum(self);
  r.cross_dominates = r.f_f1 >= r.f1_f1;

  const GridField f1 = inverse_transform(mollify(fhat, m, t));
  const double measure_a = measure(a);
  std::vector<double> powk(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != 0.0) powk[i] = std::pow(f1[i], k);
  const double f_f1k = a.spec().cell_volume() * pairwise_sum(powk);
  r.inner = std::pow(r.delta, k) * measure_a - f_f1k;
  r.inner_ratio = r.inner / (eta * measure_a);
  r.bulk_deficit_ratio = (1.0 - measure(f1) / measure_a) / eta;
  return r;
}

Lemma42Report lemma42_check(const GridField& a, double eta, double lambda, const NestedRule& rule,
                            int samples, std::uint64_t seed, std::vector<double> sweep) {
  if (!a.is_indicator() || measure(a) == 0.0) throw ParamError("lemma check needs a nonempty indicator");
  if (!(eta > 0.0 && eta < 1.0)) throw ParamError("eta must lie in (0, 1)");
  if (!(lambda > 0.0)) throw ParamError("lambda must be positive");
  Lemma42Report r;
  r.eta = eta;
  r.lambda = lambda;
  r.j = rule.j();
  const Mollifier& m = mollifier(a.spec().d);
  const double t = eta * eta * lambda;
  const Spectrum fhat = forward_transform(a);
  const Spectrum ghat = apply_radial_multiplier(fhat, [&](double rr) { return 1.0 - m.hat(t * rr); });
  const GridField g = inverse_transform_extended(ghat);
  const double measure_a = measure(a);
  const Estimate inner = indicator_sum(
      a, [&](const std::vector<Vec>& xs) { return abs_nested_average(g, xs, lambda, rule); }, false,
      samples, seed);
  r.inner = inner.value;
  r.inner_stderr = inner.stderr_;
  r.inner_ratio = r.inner / (std::pow(eta, 0.4) * measure_a);

  // I is rotation invariant; tabulate it along |xi| and interpolate.
  const auto norms = fhat.frequency_norms();
  const double rmax = lambda * fhat.spec().max_frequency();
  const int table = 2048;
  std::vector<double> radii(table + 1);
  for (int i = 0; i <= table; ++i) radii[static_cast<std::size_t>(i)] = rmax * i / table;
  const auto profile = radial_square_function(rule, radii);
  auto square = [&](double rr) {
    const double u = std::min(rr / rmax * table, static_cast<double>(table));
    const auto i = std::min(static_cast<std::size_t>(u), static_cast<std::size_t>(table - 1));
    const double f = u - static_cast<double>(i);
    return (1.0 - f) * profile[i] + f * profile[i + 1];
  };
  std::vector<double> terms(fhat.size());
  for (std::size_t i = 0; i < fhat.size(); ++i) {
    const double mult = 1.0 - m.hat(t * norms[i]);
    terms[i] = std::norm(fhat.coeffs()[i]) * mult * mult * square(lambda * norms[i]);
  }
  r.majorant = fhat.cell_volume() * pairwise_sum(terms);

  if (sweep.empty())
    for (int i = 0; i <= 400; ++i) sweep.push_back(std::pow(10.0, -3.0 + 7.0 * i / 400.0));
  const auto sweep_square = radial_square_function(rule, sweep);
  const double eta4 = std::pow(eta, 4);
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    const double u = sweep[i];  // lambda |xi|
    const double mult = 1.0 - m.hat(eta * eta * u);
    const double lhs = mult * mult * sweep_square[i];
    const double model = std::min(1.0 / std::sqrt(u), eta4 * u * u);
    r.multiplier_constant = std::max(r.multiplier_constant, lhs / model);
    r.model_peak_ratio = std::max(r.model_peak_ratio, model / std::pow(eta, 0.8));
  }
  return r;
}

bool ScaleSequence::disjoint() const {
  for (std::size_t a = 0; a < entries.size(); ++a)
    for (std::size_t b = a + 1; b < entries.size(); ++b) {
      const double lo = std::max(entries[a].lower, entries[b].lower);
      const double hi = std::min(entries[a].upper, entries[b].upper);
      if (lo < hi * (1.0 - 1e-12)) return false;
    }
  return true;
}

ScaleSequence sequence_builder(double eta, int J, SequenceMode mode, double N, double ratio) {
  if (J < 1) throw ParamError("sequence length J must be >= 1");
  if (!(eta > 0.0 && eta < 1.0)) throw ParamError("eta must lie in (0, 1)");
  if (mode == SequenceMode::pair && !(ratio >= 1.0)) throw ParamError("pair ratio must be >= 1");
  ScaleSequence seq;
  seq.eta = eta;
  seq.mode = mode;
  const double step = std::pow(eta, -4);
  double lambda0 = 1.0;
  for (int j = 0; j < J; ++j) {
    SequenceEntry e;
    e.lambda0 = lambda0;
    e.lambda1 = mode == SequenceMode::pair ? ratio * lambda0 : lambda0;
    e.lower = eta * eta / e.lambda1;
    e.upper = 1.0 / (eta * eta * e.lambda0);
    seq.entries.push_back(e);
    lambda0 = step * e.lambda1;
  }
  const double top = seq.entries.back().lambda1;
  if (top > std::pow(eta, 4) * N * (1.0 + 1e-12))
    throw OverflowError("scale " + std::to_string(top) + " exceeds eta^4 N = " +
                        std::to_string(std::pow(eta, 4) * N));
  return seq;
}

int default_sequence_length(double eps, double floor_constant) {
  if (!(eps > 0.0) || !(floor_constant > 0.0)) throw ParamError("sequence length needs eps > 0 and c0 > 0");
  return static_cast<int>(std::floor(1.0 / (floor_constant * eps * eps))) + 1;
}

std::vector<double> sequence_mass_ratios(const GridField& a, const ScaleSequence& seq) {
  // Annuli are clipped to the resolvable range; those past it carry no mass.
  const Spectrum s = forward_transform(a);
  const double top = s.spec().max_frequency();
  std::vector<std::pair<double, double>> annuli;
  std::vector<std::size_t> slot;
  for (std::size_t i = 0; i < seq.entries.size(); ++i) {
    const auto& e = seq.entries[i];
    if (e.lower >= top) continue;
    annuli.emplace_back(e.lower, std::min(e.upper, top));
    slot.push_back(i);
  }
  std::vector<double> out(seq.entries.size(), 0.0);
  const auto masses = disjoint_annulus_masses(s, annuli);
  const double measure_a = measure(a);
  for (std::size_t i = 0; i < masses.size(); ++i) out[slot[i]] = masses[i] / measure_a;
  return out;
}

}  // namespace slab
