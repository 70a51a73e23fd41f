#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "slab/grid_field.hpp"
#include "slab/simplex.hpp"
#include "slab/sphere.hpp"

namespace slab {

// One outer quadrature node of the nested sphere measure: a frame
// y_1..y_{j-1} with its weight and the configuration sphere carrying y_j.
struct OuterNode {
  double weight = 1.0;
  std::vector<Vec> frame;
  ConfigSphere sphere;
};

// Product quadrature for the iterated measure
//   d sigma_{y_1..y_{j-1}}(y_j) ... d sigma(y_1).
// Outer frames are expanded level by level; the innermost sphere keeps its
// unit rule so nodes are placed on demand.
class NestedRule {
 public:
  NestedRule(const Simplex& s, int j, int level);

  const Simplex& simplex() const { return simplex_; }
  int j() const { return j_; }
  int level() const { return level_; }
  int dim() const { return simplex_.dim(); }
  const std::vector<OuterNode>& outer() const { return outer_; }
  const UnitSphereRule& inner() const { return *inner_; }
  std::size_t node_count() const { return outer_.size() * inner_->points.size(); }

 private:
  Simplex simplex_;
  int j_;
  int level_;
  std::vector<OuterNode> outer_;
  const UnitSphereRule* inner_;
};

// Uniformly drawn cell centers of the grid (with replacement).
std::vector<Vec> sample_cell_centers(const GridSpec& spec, int count, std::uint64_t seed);

// All cell centers of the grid in storage order.
std::vector<Vec> all_cell_centers(const GridSpec& spec);

// A(g_1..g_j)(x) with j = inputs.size() = rule.j(), inputs read by
// interpolation at x - lambda y_i. Throws OutOfBox when a node can leave the
// padded box.
double nested_average(const std::vector<const GridField*>& inputs, const Vec& x, double lambda,
                      const NestedRule& rule);
std::vector<double> nested_average(const std::vector<const GridField*>& inputs,
                                   const std::vector<Vec>& xs, double lambda,
                                   const NestedRule& rule);

// Outer average of |inner average of g|.
double abs_nested_average(const GridField& g, const Vec& x, double lambda, const NestedRule& rule);
std::vector<double> abs_nested_average(const GridField& g, const std::vector<Vec>& xs,
                                       double lambda, const NestedRule& rule);

struct Estimate {
  double value = 0.0;
  double stderr_ = 0.0;
  int samples = 0;  // 0 when the value is a full-grid sum
};

// h^d times the sum of eval(x) over the cells x of the indicator a. Exact
// when full_grid is set or samples covers every cell; otherwise one cell is
// drawn per stratum of equal-size runs of cells in storage order.
Estimate indicator_sum(const GridField& a,
                       const std::function<std::vector<double>(const std::vector<Vec>&)>& eval,
                       bool full_grid, int samples, std::uint64_t seed);

// <1_A, A(1_A, ..., 1_A)> with the rule's j = k. Exact grid sum in d = 2;
// stratified sampling of the cells of A (one cell per stratum) otherwise.
Estimate count_functional(const GridField& a, double lambda, const NestedRule& rule,
                          int samples = 4096, std::uint64_t seed = 1);

struct DifferenceReport {
  double eta = 0.0;
  double sup_difference = 0.0;  // sup_x |A(g..g, f1)(x) - f1(x) A^{(j-1)}(g..g)(x)|
  double ratio = 0.0;           // sup_difference / eta
  int points = 0;
};

// f1 = g * psi_{lambda / eta}, evaluated at the points xs.
DifferenceReport difference_bound_check(const GridField& g, double eta, double lambda,
                                        const NestedRule& rule, const std::vector<Vec>& xs);

}  // namespace slab

namespace slab {

struct EquivalenceCase {
  std::vector<Vec> vertices;  // normalized simplex
  Vec x;
  double lambda = 0.0;
  double nested = 0.0;      // nested quadrature value
  double nested_error = 0.0;  // |value at level - value at level + 1|
  double monte_carlo = 0.0;
  double mc_stderr = 0.0;
  double combined_stderr = 0.0;  // sqrt(mc_stderr^2 + nested_error^2)
  double z = 0.0;                // |nested - monte_carlo| / combined_stderr
};

struct EquivalenceReport {
  int d = 0;
  int j = 0;
  std::vector<EquivalenceCase> cases;
  double max_z = 0.0;
  nlohmann::json to_json() const;
};

// Random simplices, points and scales; the inputs are j Gaussian bumps on an
// n^d grid of side 8. Compares the nested sphere quadrature with Monte Carlo
// over Haar rotations using `draws` rotations per case.
EquivalenceReport equivalence_sweep(int d, int j, int cases, int draws, int level, int n,
                                    std::uint64_t seed);

}  // namespace slab
