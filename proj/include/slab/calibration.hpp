#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "slab/corpus.hpp"
#include "slab/dichotomy.hpp"
#include "slab/manifest.hpp"

namespace slab {

// Fixed dichotomy settings shared by calibration and the shipped runs.
struct DichotomySetup {
  GridSpec grid;
  Simplex simplex;
  DichotomyParams params;
  int level = 5;
};
DichotomySetup unpinned_setup();  // d = 2, n = N = 256, k = 1
DichotomySetup pinned_setup();    // d = 3, n = N = 64, k = 1

struct CalibrationOptions {
  std::uint64_t seed = 0xCA11B;  // calibration sets use seed + small offsets
  int pinned_candidates = 256;
  int pinned_draws = 2000;
};

struct CalibrationCase {
  std::string name;
  DichotomyReport report;
};

struct CalibrationResult {
  CalibratedConstants constants;
  std::vector<CalibrationCase> cases;
  nlohmann::json to_json() const;
};

// Mollifier constants for one dimension: C_psi from the hat profile, C_tail
// and C_shift as 1% above the sup of the tail and shift ratios over a
// geometric grid of eta in [0.01, 0.5].
MollifierConstants calibrate_mollifier(int d);

// Runs the calibration corpus and fixes every constant of the manifest.
CalibrationResult calibrate(const CalibrationOptions& options = {});

// Limits implied by the constants for the given mode.
DichotomyLimits limits_from(const CalibratedConstants& c, bool pinned);

}  // namespace slab
