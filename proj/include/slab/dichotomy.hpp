#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "slab/grid_field.hpp"
#include "slab/multilinear.hpp"
#include "slab/simplex.hpp"

namespace slab {

enum class Branch { count, fourier, both, indeterminate };
std::string to_string(Branch b);

struct DichotomyParams {
  double eps = 0.1;
  double eta = 0.5;
  double lambda = 1.0;   // unpinned scale
  double lambda0 = 1.0;  // pinned scale range
  double lambda1 = 1.0;
};

// Calibrated limits. Defaults disable the constraints so calibration runs can
// explore freely.
struct DichotomyLimits {
  double floor_constant = 0.0;  // c0: the fourier branch needs mass ratio >= c0 eps^2
  double eta_constant = std::numeric_limits<double>::infinity();  // c_cal: eta <= c_cal eps^p
  double box_constant = 0.0;    // C_cal: N >= C_cal eta^{-4}
};

struct DichotomyReport {
  std::string mode;
  Branch branch = Branch::indeterminate;
  int d = 0;
  int k = 0;
  double delta = 0.0;
  DichotomyParams params;
  double count_term = 0.0;
  double count_stderr = 0.0;
  double threshold = 0.0;
  double annulus_lower = 0.0;
  double annulus_upper = 0.0;
  double annulus_mass_ratio = 0.0;
  double calibrated_floor = 0.0;
  int level = 0;
  std::uint64_t seed = 0;
  // Pinned mode only.
  std::optional<Vec> witness;
  std::vector<double> witness_probabilities;
  int candidates_tried = 0;

  nlohmann::json to_json() const;
};

// (1/|A|) times the mass of |1_A^|^2 on lower <= |xi| <= upper.
double annulus_mass_ratio(const GridField& a, const Spectrum& s, double lower, double upper);

// Throws ParamError on violated parameter constraints, RangeError when the
// annulus exceeds the grid's frequency range.
DichotomyReport check_unpinned(const GridField& a, const Simplex& s, const DichotomyParams& p,
                               const DichotomyLimits& limits, int level, std::uint64_t seed,
                               int count_samples = 4096);

struct PinnedOptions {
  int candidates = 4096;   // x samples drawn from A
  int draws = 2000;        // rotations per pin probability
  int grid_points = 16;    // scales in [lambda0, lambda1]
};

DichotomyReport check_pinned(const GridField& a, const Simplex& s, const DichotomyParams& p,
                             const DichotomyLimits& limits, int level, std::uint64_t seed,
                             const PinnedOptions& options = {});

struct Lemma41Report {
  double delta = 0.0;
  double eta = 0.0;
  double lambda = 0.0;
  int k = 0;
  double inner = 0.0;        // <f, delta^k - f1^k>
  double inner_ratio = 0.0;  // inner / (eta |A|)
  double f_f1 = 0.0;         // integral of f f1
  double f1_f1 = 0.0;        // integral of f1^2
  bool cross_dominates = false;  // f_f1 >= f1_f1
  double bulk_deficit_ratio = 0.0;  // (1 - integral over B_N of f1 / |A|) / eta
};

// f1 = 1_A * psi_{lambda/eta}. Throws ParamError unless eta <= delta/10 and
// 0 < lambda <= eta^4 N.
Lemma41Report lemma41_check(const GridField& a, double eta, double lambda, int k);

struct Lemma42Report {
  double eta = 0.0;
  double lambda = 0.0;
  int j = 0;
  double inner = 0.0;         // <f, A(f - f2)>
  double inner_stderr = 0.0;
  double inner_ratio = 0.0;   // inner / (eta^{2/5} |A|)
  double majorant = 0.0;      // integral |f^|^2 |1 - h(eta^2 lambda |xi|)|^2 I(lambda xi)
  double multiplier_constant = 0.0;  // sup multiplier / min{(lambda r)^{-1/2}, eta^4 (lambda r)^2}
  double model_peak_ratio = 0.0;     // sup of the min term / eta^{4/5}
};

// f2 = 1_A * psi_{eta^2 lambda}. The multiplier sweep runs over lambda |xi|
// in `sweep` (defaults to a log grid on [1e-3, 1e4]).
Lemma42Report lemma42_check(const GridField& a, double eta, double lambda, const NestedRule& rule,
                            int samples, std::uint64_t seed, std::vector<double> sweep = {});

enum class SequenceMode { single, pair };

struct SequenceEntry {
  double lambda0 = 0.0;
  double lambda1 = 0.0;  // equals lambda0 in single mode
  double lower = 0.0;    // eta^2 / lambda1
  double upper = 0.0;    // eta^{-2} / lambda0
};

struct ScaleSequence {
  double eta = 0.0;
  SequenceMode mode = SequenceMode::single;
  std::vector<SequenceEntry> entries;
  // Open annuli are pairwise disjoint (closed ones may share an endpoint).
  bool disjoint() const;
};

// lambda^{(1)} = 1 and lambda^{(j+1)} = eta^{-4} lambda^{(j)} (single), or
// lambda1 = ratio lambda0 and lambda0^{(j+1)} = eta^{-4} lambda1^{(j)} (pair).
// Throws OverflowError when the last scale exceeds eta^4 N.
ScaleSequence sequence_builder(double eta, int J, SequenceMode mode, double N,
                               double ratio = 2.0);
// Smallest J with J c0 eps^2 > 1.
int default_sequence_length(double eps, double floor_constant);

// Mass ratios of the sequence annuli, crediting shared endpoints once.
// Annuli are clipped at the grid's largest frequency.
std::vector<double> sequence_mass_ratios(const GridField& a, const ScaleSequence& seq);

}  // namespace slab
