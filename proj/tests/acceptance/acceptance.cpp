// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <nlohmann/json.hpp>

#include "slab/calibration.hpp"
#include "slab/corpus.hpp"
#include "slab/dichotomy.hpp"
#include "slab/maximal.hpp"
#include "slab/mollifier.hpp"
#include "slab/multilinear.hpp"
#include "slab/sphere.hpp"

using namespace slab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Detail {
 public:
  template <class T>
  Detail& operator<<(const T& v) {
    out_ << v;
    return *this;
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Simplex axis_simplex(int d, int k) {
  std::vector<Vec> raw;
  for (int i = 0; i < k; ++i) {
    Vec v = Vec::Zero(d);
    v[i] = 1.0;
    raw.push_back(v);
  }
  return normalize_simplex(raw, d);
}

// A fixed skew simplex with unequal edges.
Simplex skew_simplex(int d, int k) {
  std::vector<Vec> raw;
  for (int i = 0; i < k; ++i) {
    Vec v = Vec::Zero(d);
    v[i] = 1.0 + 0.3 * i;
    v[(i + 1) % d] += 0.4;
    raw.push_back(v);
  }
  return normalize_simplex(raw, d);
}

// 1. Nested quadrature against rotation Monte Carlo.
Outcome operator_equivalence() {
  Outcome o;
  Detail det;
  const auto t0 = std::chrono::steady_clock::now();
  const int groups[][2] = {{1, 2}, {1, 3}, {2, 3}, {2, 4}};
  for (const auto& g : groups) {
    const int j = g[0], d = g[1];
    const EquivalenceReport r = equivalence_sweep(d, j, 50, 10000, 3, d >= 4 ? 16 : 32, 7);
    std::size_t worst = 0;
    for (std::size_t i = 0; i < r.cases.size(); ++i)
      if (r.cases[i].z > r.cases[worst].z) worst = i;
    const bool ok = r.max_z <= 3.0;
    o.pass = o.pass && ok;
    det << "(j=" << j << ",d=" << d << ") max_z=" << r.max_z;
    if (!ok) det << " at case " << worst;
    det << "; ";
  }
  const double elapsed = seconds_since(t0);
  o.pass = o.pass && elapsed <= 600.0;
  det << "runtime " << elapsed << " s";
  o.detail = det.str();
  return o;
}

std::vector<GridField> indicator_corpus() {
  const GridSpec g2{2, 256.0, 256, 2};
  const GridSpec g3{3, 64.0, 64, 2};
  std::vector<GridField> out;
  for (const GridSpec& g : {g2, g3}) {
    out.push_back(generate(CorpusSpec::random_set(g, 0.3, 11)));
    out.push_back(generate(CorpusSpec::lattice(g, 4.0)));
    out.push_back(generate(CorpusSpec::shells(g, arithmetic_radii(4.0, g.N / 16.0, 0.5 * g.N), g.N / 64.0)));
    out.push_back(generate(CorpusSpec::cantor(g, 0.4, 2)));
  }
  return out;
}

// 2. Normalization, Parseval and disjoint annulus masses.
Outcome normalization() {
  Outcome o;
  Detail det;
  int spheres = 0;
  for (int d = 2; d <= 4; ++d)
    for (int j = 1; j < d; ++j)
      for (const Simplex& s : {axis_simplex(d, j), skew_simplex(d, j)}) {
        const ConfigSphere cs = config_sphere(s, j, canonical_frame(s, j - 1));
        const auto v = sphere_ft(cs, Vec::Zero(d));
        o.pass = o.pass && v.real() == 1.0 && v.imag() == 0.0;
        ++spheres;
      }
  det << "sphere_ft(0) == 1 on " << spheres << " spheres: " << (o.pass ? "yes" : "no") << "; ";

  double worst_parseval = 0.0, worst_sequence = 0.0, worst_partition = 0.0;
  for (const GridField& a : indicator_corpus()) {
    const Spectrum s = forward_transform(a);
    const double m = measure(a);
    worst_parseval = std::max(worst_parseval, std::abs(spectral_energy(s) - l2_norm_squared(a)) / m);
    const double eta = 0.75;
    const double N = a.spec().N;
    int J = 1;
    while (std::pow(eta, -4.0 * J) <= std::pow(eta, 4) * N) ++J;
    for (SequenceMode mode : {SequenceMode::single, SequenceMode::pair}) {
      const ScaleSequence seq = sequence_builder(eta, mode == SequenceMode::single ? J : J - 1, mode, N);
      double total = 0.0;
      for (double r : sequence_mass_ratios(a, seq)) total += r;
      worst_sequence = std::max(worst_sequence, total);
    }
    std::vector<std::pair<double, double>> partition;
    const double top = a.spec().max_frequency();
    const int pieces = 64;
    for (int i = 0; i < pieces; ++i) partition.emplace_back(top * i / pieces, top * (i + 1) / pieces);
    double total = 0.0;
    for (double v : disjoint_annulus_masses(s, partition)) total += v;
    worst_partition = std::max(worst_partition, total / m);
  }
  o.pass = o.pass && worst_parseval <= 1e-6 && worst_sequence <= 1.0 + 1e-6 && worst_partition <= 1.0 + 1e-6;
  det << "worst Parseval error " << worst_parseval << "; max sequence sum " << worst_sequence
      << "; max partition sum " << worst_partition;
  o.detail = det.str();
  return o;
}

// 3. Square function envelopes.
Outcome decay_envelopes() {
  Outcome o;
  Detail det;
  for (const auto& [d, j] : std::vector<std::pair<int, int>>{{3, 1}, {4, 2}}) {
    const Simplex s = axis_simplex(d, j);
    const EnvelopeReport base = square_function_envelope(NestedRule(s, j, 3), 1.0, 1000.0, 24);
    const EnvelopeReport fine = square_function_envelope(NestedRule(s, j, 4), 1.0, 1000.0, 24);
    const double drift = std::abs(fine.envelope_constant - base.envelope_constant) / base.envelope_constant;
    const bool ok = drift <= 0.05 && std::isfinite(base.envelope_constant) && !base.tilde_grows &&
                    std::isfinite(base.tilde_constant);
    o.pass = o.pass && ok;
    det << "(d=" << d << ",j=" << j << ") envelope " << base.envelope_constant << " drift " << drift
        << " derivative sup " << base.tilde_constant << (base.tilde_grows ? " grows" : " bounded") << "; ";
  }
  for (const auto& [d, j] : std::vector<std::pair<int, int>>{{2, 1}, {3, 2}}) {
    const EnvelopeReport r = square_function_envelope(NestedRule(axis_simplex(d, j), j, 3), 1.0, 1000.0, 24);
    o.pass = o.pass && r.tilde_grows;
    det << "(d=" << d << ",j=" << j << ") derivative " << (r.tilde_grows ? "grows" : "does not grow") << "; ";
  }
  o.detail = det.str();
  return o;
}

// 4. Mollifier tail, shift and smoothing inequalities.
Outcome mollifier_lemmas(const CalibratedConstants& c) {
  Outcome o;
  Detail det;
  double worst_tail = 0.0, worst_shift = 0.0;
  int checks = 0;
  for (int d = 2; d <= 4; ++d) {
    const Mollifier& m = mollifier(d);
    const MollifierConstants& mc = c.mollifier.at(d);
    for (int j = 1; j < d; ++j)
      for (const Simplex& s : {axis_simplex(d, j), skew_simplex(d, j)}) {
        const ConfigSphere cs = config_sphere(s, j, canonical_frame(s, j - 1));
        for (double eta : {0.2, 0.1, 0.05, 0.02})
          for (double lambda : {1.0, 4.0, 16.0}) {
            const TailShiftReport r = tail_and_shift_bounds(m, eta, lambda / eta, lambda, cs);
            worst_tail = std::max(worst_tail, r.tail_ratio / mc.C_tail);
            worst_shift = std::max(worst_shift, r.shift_ratio / (mc.C_shift * std::max(1.0, r.vertex_norm)));
            ++checks;
          }
      }
  }
  o.pass = worst_tail <= 1.0 && worst_shift <= 1.0;
  det << checks << " tail/shift checks, max tail/C_tail " << worst_tail << ", max shift/bound " << worst_shift << "; ";

  int spectral_ok = 0, physical_ok = 0;
  const GridSpec g{2, 64.0, 64, 2};
  const Mollifier& m2 = mollifier(2);
  for (int i = 0; i < 100; ++i) {
    const double delta = 0.25 + 0.55 * (i % 10) / 9.0;
    const GridField a = generate(CorpusSpec::random_set(g, delta, 5000 + static_cast<std::uint64_t>(i)));
    const double eta = 0.02;
    const Lemma41Report r = lemma41_check(a, eta, std::pow(eta, 4) * g.N, 1);
    spectral_ok += r.cross_dominates ? 1 : 0;
    // Physical space on the box: the box integral of f1^2 is at most the
    // torus integral, which the cross term dominates.
    const GridField f1 = mollify(a, m2, 4.0);
    double cross = 0.0, self = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) {
      cross += a[c] * f1[c];
      self += f1[c] * f1[c];
    }
    physical_ok += cross >= self ? 1 : 0;
  }
  o.pass = o.pass && spectral_ok == 100 && physical_ok == 100;
  det << "cross term dominates on " << spectral_ok << "/100 (spectral) and " << physical_ok << "/100 (physical)";
  o.detail = det.str();
  return o;
}

// 5. Decay of the mollified maximal operator in L.
Outcome mollified_scaling() {
  Outcome o;
  Detail det;
  const auto t0 = std::chrono::steady_clock::now();
  const double lambda0 = 8.0, spread = 16.0;
  const GridSpec g{3, 2.0 * spread * lambda0, 64, 2};
  const auto corpus = probe_fields(g, 2.0 * lambda0, 3, 1);
  std::vector<double> Ls;
  for (int e = -6; e <= 0; ++e) Ls.push_back(std::ldexp(lambda0, e));
  const Thm61Report r = thm61_scaling(corpus, NestedRule(axis_simplex(3, 1), 1, 3),
                                      LambdaGrid(lambda0, spread * lambda0, 8), Ls);
  const double elapsed = seconds_since(t0);
  // Recheck every row against the constant measured at L = lambda0.
  bool rows_ok = true;
  for (const Thm61Row& row : r.rows)
    rows_ok = rows_ok && row.ratio <= r.constant * std::cbrt(row.L / lambda0) * (1.0 + 1e-12);
  o.pass = rows_ok && r.pass && r.slope >= 1.0 / 3.0 - 0.1 && elapsed <= 1800.0;
  det << "constant " << r.constant << ", slope " << r.slope << ", rows " << (rows_ok ? "within" : "exceed")
      << " bound, runtime " << elapsed << " s";
  o.detail = det.str();
  return o;
}

// 6. Unpinned dichotomy on a mixed corpus.
Outcome unpinned_dichotomy(const CalibratedConstants& c) {
  Outcome o;
  Detail det;
  const DichotomySetup setup = unpinned_setup();
  const DichotomyLimits limits = limits_from(c, false);
  const GridSpec& g = setup.grid;
  struct Item {
    std::string name;
    CorpusSpec spec;
  };
  std::vector<Item> items;
  for (double delta : {0.2, 0.3, 0.4, 0.5})
    for (std::uint64_t seed : {101u, 202u})
      items.push_back({"random", CorpusSpec::random_set(g, delta, seed + static_cast<std::uint64_t>(100 * delta))});
  items.push_back({"random", CorpusSpec::random_set(g, 0.5, 303)});
  for (double spacing : {2.0, 3.0, 4.0, 5.0}) items.push_back({"lattice", CorpusSpec::lattice(g, spacing)});
  for (double r0 : {6.0, 10.0, 12.0, 14.0})
    items.push_back({"shells", CorpusSpec::shells(g, arithmetic_radii(r0, 16.0, 0.5 * g.N), 4.0)});
  items.push_back({"shells", CorpusSpec::shells(g, arithmetic_radii(5.0, 20.0, 0.5 * g.N), 5.0)});
  items.push_back({"cantor", CorpusSpec::cantor(g, 0.4, 2)});
  items.push_back({"cantor", CorpusSpec::cantor(g, 0.3, 3)});
  items.push_back({"cantor", CorpusSpec::cantor(g, 0.45, 3)});

  int indeterminate = 0, random_bad = 0, index = 0;
  for (const Item& it : items) {
    const GridField a = generate(it.spec);
    const DichotomyReport r = check_unpinned(a, setup.simplex, setup.params, limits, setup.level,
                                             1000 + static_cast<std::uint64_t>(index++));
    if (r.branch == Branch::indeterminate) {
      ++indeterminate;
      det << it.name << " #" << index << " indeterminate (count " << r.count_term << ", mass "
          << r.annulus_mass_ratio << "); ";
    }
    if (it.name == "random") {
      const double target = std::pow(r.delta, r.k + 1);
      if (r.branch != Branch::count || std::abs(r.count_term - target) > 0.05) {
        ++random_bad;
        det << "random density " << r.delta << " branch " << to_string(r.branch) << " count "
            << r.count_term << "; ";
      }
    }
  }
  o.pass = items.size() >= 20 && indeterminate == 0 && random_bad == 0;
  det << items.size() << " sets, " << indeterminate << " indeterminate, " << random_bad << " random sets off target";
  o.detail = det.str();
  return o;
}

// 7. Pinned dichotomy.
Outcome pinned_dichotomy(const CalibratedConstants& c) {
  Outcome o;
  Detail det;
  const DichotomySetup setup = pinned_setup();
  const DichotomyLimits limits = limits_from(c, true);
  const GridSpec& g = setup.grid;
  const PinnedOptions po;
  int index = 0;
  auto run = [&](const GridField& a) {
    return check_pinned(a, setup.simplex, setup.params, limits, setup.level,
                        2000 + static_cast<std::uint64_t>(index++), po);
  };
  std::vector<std::pair<std::string, GridField>> witness_sets;
  witness_sets.emplace_back("box", GridField(g, 1.0));
  witness_sets.emplace_back("random 0.5", generate(CorpusSpec::random_set(g, 0.5, 401)));
  witness_sets.emplace_back("random 0.5", generate(CorpusSpec::random_set(g, 0.5, 402)));
  witness_sets.emplace_back("random 0.3", generate(CorpusSpec::random_set(g, 0.3, 403)));
  for (const auto& [name, a] : witness_sets) {
    const DichotomyReport r = run(a);
    bool ok = r.witness.has_value() && r.witness_probabilities.size() == 16;
    for (double p : r.witness_probabilities) ok = ok && p > std::pow(r.delta, r.k) - setup.params.eps;
    o.pass = o.pass && ok && r.branch != Branch::indeterminate;
    det << name << (ok ? " witness" : " no witness") << " (" << to_string(r.branch) << "); ";
  }
  for (double r0 : {6.0, 8.0}) {
    const GridField a = generate(CorpusSpec::shells(g, arithmetic_radii(r0, 8.0, 0.5 * g.N), 2.0));
    const DichotomyReport r = run(a);
    const bool ok = r.branch == Branch::fourier || r.branch == Branch::both;
    o.pass = o.pass && ok;
    det << "shells r0=" << r0 << " " << to_string(r.branch) << " mass " << r.annulus_mass_ratio << "; ";
  }
  o.detail = det.str();
  return o;
}

// 8. Stability of the maximal L2 ratio under refinement.
Outcome maximal_stability() {
  Outcome o;
  Detail det;
  const NestedRule rule(axis_simplex(3, 1), 1, 3);
  auto ratio = [&](int n, int q) {
    const auto corpus = probe_fields(GridSpec{3, 64.0, n, 2}, 4.0, 3, 1);
    return l2_ratio_maximal(corpus, rule, LambdaGrid(8.0, 16.0, q)).max_ratio;
  };
  const double base = ratio(64, 8);
  const double scales = ratio(64, 16);
  const double grid = ratio(128, 8);
  const double d1 = std::abs(scales - base) / base, d2 = std::abs(grid - base) / base;
  o.pass = d1 <= 0.10 && d2 <= 0.10;
  det << "n64 q8 " << base << ", n64 q16 " << scales << " (" << d1 << "), n128 q8 " << grid << " (" << d2 << ")";
  o.detail = det.str();
  return o;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SLAB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Largest absolute difference between matching numbers; infinity when the
// structures differ.
double json_distance(const nlohmann::json& a, const nlohmann::json& b) {
  if (a.is_number() && b.is_number()) return std::abs(a.get<double>() - b.get<double>());
  if (a.type() != b.type() || a.size() != b.size()) return INFINITY;
  if (a.is_object()) {
    double worst = 0.0;
    for (auto it = a.begin(); it != a.end(); ++it) {
      if (!b.contains(it.key())) return INFINITY;
      worst = std::max(worst, json_distance(*it, b.at(it.key())));
    }
    return worst;
  }
  if (a.is_array()) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, json_distance(a[i], b[i]));
    return worst;
  }
  return a == b ? 0.0 : INFINITY;
}

// 9. Determinism of the command line reports.
Outcome determinism() {
  Outcome o;
  Detail det;
  const fs::path dir = fs::temp_directory_path() / "slab_acceptance";
  fs::create_directories(dir);
  const std::string set = (dir / "set.slab").string();
  if (run_cli("generate --kind random --d 2 --n 128 --density 0.4 --seed 9 --out " + (dir / "set.json").string()) != 0)
    return {false, "set generation failed"};
  const std::vector<std::string> commands = {
      "dichotomy --set " + set + " --eps 0.1 --eta 0.75 --lambda 4",
      "maximal --d 3 --n 32 --N 32 --lambda0 4 --lambda1 8",
      "lemma42 --set " + set + " --eta 0.5 --lambda 4 --samples 256",
  };
  for (std::size_t i = 0; i < commands.size(); ++i) {
    const std::string stem = (dir / ("run" + std::to_string(i))).string();
    int codes = 0;
    codes += run_cli(commands[i] + " --threads 1 --out " + stem + "_a.json") != 0;
    codes += run_cli(commands[i] + " --threads 1 --out " + stem + "_b.json") != 0;
    codes += run_cli(commands[i] + " --threads 3 --out " + stem + "_c.json") != 0;
    const std::string a = slurp(stem + "_a.json"), b = slurp(stem + "_b.json"), c = slurp(stem + "_c.json");
    const bool same = !a.empty() && a == b;
    double dist = INFINITY;
    try {
      dist = json_distance(nlohmann::json::parse(a), nlohmann::json::parse(c));
    } catch (const nlohmann::json::exception&) {
    }
    o.pass = o.pass && codes == 0 && same && dist <= 1e-12;
    det << commands[i].substr(0, commands[i].find(' ')) << ": " << (same ? "identical" : "differs")
        << ", thread drift " << dist << "; ";
  }
  o.detail = det.str();
  return o;
}

}  // namespace

int main() {
  std::cout.precision(6);
  const auto t0 = std::chrono::steady_clock::now();
  const CalibrationResult cal = calibrate();
  std::cout << "calibration finished in " << seconds_since(t0) << " s" << std::endl;

  const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, operator_equivalence},
      {2, normalization},
      {3, decay_envelopes},
      {4, [&] { return mollifier_lemmas(cal.constants); }},
      {5, mollified_scaling},
      {6, [&] { return unpinned_dichotomy(cal.constants); }},
      {7, [&] { return pinned_dichotomy(cal.constants); }},
      {8, maximal_stability},
      {9, determinism},
  };
  int failures = 0;
  for (const auto& [id, fn] : criteria) {
    Outcome out;
    try {
      out = fn();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    failures += out.pass ? 0 : 1;
    std::cout << "criterion " << id << ": " << (out.pass ? "PASS" : "FAIL") << " " << out.detail << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria fail") << std::endl;
  return failures == 0 ? 0 : 1;
}
