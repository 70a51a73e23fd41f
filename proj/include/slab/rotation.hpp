#pragma once

#include <cstdint>
#include <vector>

#include "slab/grid_field.hpp"
#include "slab/simplex.hpp"

namespace slab {

// Haar-distributed rotations of R^d. Draw number c of seed s is a pure
// function of (s, c), so any draw can be replayed and workers can share one
// stream without coordination.
class HaarSampler {
 public:
  HaarSampler(int d, std::uint64_t seed, std::uint64_t counter = 0);

  int dim() const { return d_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

  Rotation draw();
  Rotation draw_at(std::uint64_t counter) const;
  // Reserves `count` consecutive draws and returns the first index.
  std::uint64_t reserve(std::uint64_t count);

 private:
  int d_;
  std::uint64_t seed_;
  std::uint64_t counter_;
};

struct PinProbability {
  Vec x;
  double lambda = 0.0;
  double estimate = 0.0;
  double stderr_ = 0.0;
  int samples = 0;
};

struct McEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
  int samples = 0;
};

// Throws OutOfBox unless |x_a| + reach <= padded half-width on every axis.
void require_clearance(const GridSpec& spec, const Vec& x, double reach);

// Fraction of draws U with A(x + lambda U v_i) >= 1/2 for every vertex v_i,
// where A is read through the multilinear interpolant. Consumes `samples`
// draws from the sampler.
PinProbability pin_probability(const GridField& a, const Vec& x, double lambda, const Simplex& s,
                               int samples, HaarSampler& sampler);

// Same estimate over several scales with the same rotation draws.
std::vector<PinProbability> pin_probability_sweep(const GridField& a, const Vec& x,
                                                  const std::vector<double>& lambdas,
                                                  const Simplex& s, int samples,
                                                  HaarSampler& sampler);

// Monte Carlo mean of g_1(x - lambda U v_1) ... g_j(x - lambda U v_j) over
// Haar-random U, with j = inputs.size().
McEstimate mc_multilinear(const std::vector<const GridField*>& inputs, const Vec& x,
                          double lambda, const Simplex& s, int samples, HaarSampler& sampler);

}  // namespace slab
