#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "slab/grid_field.hpp"

namespace slab {

// Recipe for a test set on a grid. Every kind is a pure function of the
// spec.
struct CorpusSpec {
  enum class Kind { random, lattice, shells, cantor, file };
  Kind kind = Kind::random;
  GridSpec grid;
  double density = 0.5;          // random
  std::uint64_t seed = 1;        // random
  double spacing = 1.0;          // lattice, a multiple of the cell width
  std::vector<double> radii;     // shells
  double thickness = 1.0;        // shells
  double ratio = 1.0 / 3.0;      // cantor: kept fraction of each side
  int depth = 1;                 // cantor
  std::string path;              // file

  static CorpusSpec random_set(const GridSpec& grid, double density, std::uint64_t seed);
  static CorpusSpec lattice(const GridSpec& grid, double spacing);
  static CorpusSpec shells(const GridSpec& grid, std::vector<double> radii, double thickness);
  static CorpusSpec cantor(const GridSpec& grid, double ratio, int depth);
  static CorpusSpec file(const std::string& path);

  nlohmann::json to_json() const;
  static CorpusSpec from_json(const nlohmann::json& j);
};

// r0, r0 q, r0 q^2, ... up to rmax.
std::vector<double> geometric_radii(double r0, double q, double rmax);
// r0, r0 + period, ... up to rmax.
std::vector<double> arithmetic_radii(double r0, double period, double rmax);

// Throws IOError for unreadable files and ParamError for an empty result or
// invalid parameters.
GridField generate(const CorpusSpec& spec);

// |A| / N^d.
double density(const GridField& a);

// Combined volume of the shells {r - t/2 <= |x| <= r + t/2}, clipped at 0.
double shell_volume(int d, const std::vector<double>& radii, double thickness);

}  // namespace slab

namespace slab {

// Test functions for the L2 maximal experiments: a centered cube and ball
// of side/diameter comparable to `scale`, a Gaussian bump of width `scale`,
// and Gaussian wave packets at frequencies 2^b / scale for b < bands. The
// last member is a random indicator drawn with `seed`.
std::vector<GridField> probe_fields(const GridSpec& grid, double scale, int bands,
                                    std::uint64_t seed);

}  // namespace slab
