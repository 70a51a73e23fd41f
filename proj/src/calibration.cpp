#include "slab/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "slab/errors.hpp"
#include "slab/maximal.hpp"
#include "slab/mollifier.hpp"

namespace slab {

namespace {

constexpr double kMargin = 1.25;
constexpr double kUnpinnedExponent = 2.5;
constexpr double kPinnedExponent = 3.0;

std::vector<double> eta_grid() {
  std::vector<double> out;
  const int points = 24;
  for (int i = 0; i < points; ++i) out.push_back(0.5 * std::pow(0.01 / 0.5, static_cast<double>(i) / (points - 1)));
  return out;
}

bool count_fails(const DichotomyReport& r) {
  if (r.mode == "pinned") return !r.witness.has_value();
  return !(r.count_term > r.threshold);
}

}  // namespace

DichotomySetup unpinned_setup() {
  GridSpec grid{2, 256.0, 256, 2};
  DichotomyParams p;
  p.eps = 0.02;
  p.eta = 0.75;
  p.lambda = 10.0;
  return DichotomySetup{grid, normalize_simplex({(Vec(2) << 1.0, 0.0).finished()}), p, 5};
}

DichotomySetup pinned_setup() {
  GridSpec grid{3, 64.0, 64, 2};
  DichotomyParams p;
  p.eps = 0.02;
  p.eta = 0.75;
  p.lambda0 = 4.5;
  p.lambda1 = 5.5;
  return DichotomySetup{grid, normalize_simplex({(Vec(3) << 1.0, 0.0, 0.0).finished()}), p, 4};
}

MollifierConstants calibrate_mollifier(int d) {
  const Mollifier& m = mollifier(d);
  MollifierConstants c;
  c.C_psi = m.hat_slope_constant();
  c.tabulation_radius = m.tabulation_radius();
  double tail = 0.0, shift = m.gradient_l1();
  for (double eta : eta_grid()) {
    tail = std::max(tail, m.tail_integral(1.0 / eta) / eta);
    shift = std::max(shift, m.shift_modulus(eta) / eta);
  }
  c.C_tail = 1.01 * tail;
  c.C_shift = 1.01 * shift;
  return c;
}

DichotomyLimits limits_from(const CalibratedConstants& c, bool pinned) {
  DichotomyLimits l;
  l.floor_constant = c.c0;
  l.eta_constant = pinned ? c.c_cal_pinned : c.c_cal;
  l.box_constant = c.C_cal;
  return l;
}

nlohmann::json CalibrationResult::to_json() const {
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& c : cases) cs.push_back({{"name", c.name}, {"report", c.report.to_json()}});
  return {{"constants", constants.to_json()}, {"cases", cs}};
}

CalibrationResult calibrate(const CalibrationOptions& options) {
  CalibrationResult out;
  CalibratedConstants& k = out.constants;
  for (int d = 2; d <= 4; ++d) k.mollifier[d] = calibrate_mollifier(d);

  const std::uint64_t seed = options.seed;

  // Dichotomy cases. Shell sets put distance lambda between shells, random
  // sets are spectrally flat, lattices have small density.
  const DichotomySetup un = unpinned_setup();
  auto run_unpinned = [&](const std::string& name, const CorpusSpec& spec) {
    out.cases.push_back({name, check_unpinned(generate(spec), un.simplex, un.params, {}, un.level, seed)});
  };
  run_unpinned("unpinned_random_a", CorpusSpec::random_set(un.grid, 0.5, seed + 1));
  run_unpinned("unpinned_random_b", CorpusSpec::random_set(un.grid, 0.3, seed + 2));
  run_unpinned("unpinned_shells_r4", CorpusSpec::shells(un.grid, arithmetic_radii(4.0, 16.0, 200.0), 4.0));
  run_unpinned("unpinned_shells_r8", CorpusSpec::shells(un.grid, arithmetic_radii(8.0, 16.0, 200.0), 4.0));
  run_unpinned("unpinned_lattice", CorpusSpec::lattice(un.grid, 2.0));

  const DichotomySetup pin = pinned_setup();
  PinnedOptions po;
  po.candidates = options.pinned_candidates;
  po.draws = options.pinned_draws;
  auto run_pinned = [&](const std::string& name, const CorpusSpec& spec) {
    out.cases.push_back({name, check_pinned(generate(spec), pin.simplex, pin.params, {}, pin.level, seed, po)});
  };
  run_pinned("pinned_random", CorpusSpec::random_set(pin.grid, 0.5, seed + 3));
  run_pinned("pinned_shells_r4", CorpusSpec::shells(pin.grid, arithmetic_radii(4.0, 8.0, 60.0), 2.0));

  // c0: half the smallest mass ratio, in units of eps^2, among the cases
  // where the count statement fails.
  double smallest = std::numeric_limits<double>::infinity();
  for (const auto& c : out.cases)
    if (count_fails(c.report))
      smallest = std::min(smallest, c.report.annulus_mass_ratio / (c.report.params.eps * c.report.params.eps));
  if (!std::isfinite(smallest)) throw PreconditionError("calibration corpus has no fourier-branch case");
  k.c0 = 0.5 * smallest;

  // With the floor fixed, the largest eta / eps^p among passing cases and
  // the smallest N eta^4 bound the admissible parameters.
  k.C_cal = std::numeric_limits<double>::infinity();
  for (auto& c : out.cases) {
    DichotomyReport& r = c.report;
    r.calibrated_floor = k.c0 * r.params.eps * r.params.eps;
    const bool count = !count_fails(r);
    const bool fourier = r.annulus_mass_ratio >= r.calibrated_floor;
    r.branch = count && fourier ? Branch::both : count ? Branch::count : fourier ? Branch::fourier : Branch::indeterminate;
    if (r.branch == Branch::indeterminate) continue;
    const bool pinned = r.mode == "pinned";
    const double ratio = r.params.eta / std::pow(r.params.eps, pinned ? kPinnedExponent : kUnpinnedExponent);
    (pinned ? k.c_cal_pinned : k.c_cal) = std::max(pinned ? k.c_cal_pinned : k.c_cal, ratio);
    k.C_cal = std::min(k.C_cal, (pinned ? pin : un).grid.N * std::pow(r.params.eta, 4));
  }

  // Lemma constants on random sets.
  {
    const GridSpec g{2, 128.0, 128, 2};
    const double eta = 0.02;
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 2; ++s) {
      const GridField a = generate(CorpusSpec::random_set(g, 0.4, seed + 10 + s));
      worst = std::max(worst, lemma41_check(a, eta, std::pow(eta, 4) * g.N, 1).inner_ratio);
    }
    k.C_41 = kMargin * worst;
  }
  {
    const GridSpec g{2, 128.0, 128, 2};
    const NestedRule rule(normalize_simplex({(Vec(2) << 1.0, 0.0).finished()}), 1, 5);
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 2; ++s) {
      const GridField a = generate(CorpusSpec::random_set(g, 0.5, seed + 20 + s));
      worst = std::max(worst, lemma42_check(a, 0.05, 8.0, rule, 2048, seed + 20 + s).inner_ratio);
    }
    k.C_42 = kMargin * worst;
  }

  // Maximal constants on a coarse d = 3 grid.
  {
    const double lambda0 = 4.0;
    const NestedRule rule(normalize_simplex({(Vec(3) << 1.0, 0.0, 0.0).finished()}), 1, 3);
    const GridSpec wide{3, 32.0 * lambda0, 32, 2};
    std::vector<double> Ls;
    for (int e = -6; e <= 0; ++e) Ls.push_back(std::ldexp(lambda0, e));
    const auto scaling = thm61_scaling(probe_fields(wide, 2.0 * lambda0, 3, seed + 30), rule,
                                       LambdaGrid(lambda0, 16.0 * lambda0, 8), Ls);
    k.C_61 = scaling.constant;
    const GridSpec tight{3, 4.0 * lambda0, 32, 2};
    const auto maximal = l2_ratio_maximal(probe_fields(tight, lambda0 / 2.0, 3, seed + 31), rule,
                                          LambdaGrid(lambda0 / 4.0, lambda0 / 2.0, 8));
    k.C_max = kMargin * maximal.max_ratio;
  }
  return out;
}

}  // namespace slab
