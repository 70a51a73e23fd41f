#pragma once

#include <functional>
#include <string>
#include <vector>

#include "slab/grid_field.hpp"
#include "slab/multilinear.hpp"

namespace slab {

// Geometric scale grid from lambda0 to lambda1 inclusive. The step is
// (lambda1/lambda0)^(1/count) with count the smallest integer keeping it at
// most 1 + 1/q, so both endpoints are hit exactly.
class LambdaGrid {
 public:
  LambdaGrid(double lambda0, double lambda1, int q = 8);
  // Grid with exactly `points` values (points >= 2 unless lambda0 == lambda1).
  static LambdaGrid with_points(double lambda0, double lambda1, int points);

  double lambda0() const { return lambda0_; }
  double lambda1() const { return lambda1_; }
  double ratio() const { return ratio_; }
  const std::vector<double>& values() const { return values_; }
  // Inserts the geometric midpoint of every step; a superset of this grid.
  LambdaGrid refined() const;

 private:
  LambdaGrid(double lambda0, double lambda1, std::size_t intervals, int q);
  double lambda0_, lambda1_;
  int q_;
  double ratio_;
  std::vector<double> values_;
};

// Radial Fourier multiplier m(|xi|) applied before the sphere averages.
struct MultiplierSpec {
  enum class Kind { mollified, custom };
  Kind kind = Kind::mollified;
  double L = 0.0;
  std::function<double(double)> custom;

  // m(r) = 1 - h(L r) with h the mollifier profile.
  static MultiplierSpec mollified(double L);
  static MultiplierSpec make_custom(std::function<double(double)> fn);
  double operator()(int d, double r) const;
};

// sup over the grid of abs_nested_average(g) at each point.
std::vector<double> maximal_average(const GridField& g, const NestedRule& rule,
                                    const LambdaGrid& grid, const std::vector<Vec>& xs);

// Full-grid spectral evaluation of
//   sup_lambda outer-average | inverse( g^ m sigma^_frame(lambda xi) ) |
// over the whole padded torus, one value per torus cell. The torus holds the
// support of every average when lambda <= N/2. With `per_lambda`, the
// per-scale outer averages are passed to the callback before the sup.
std::vector<double> spectral_maximal(
    const Spectrum& g, const NestedRule& rule, const std::vector<double>& lambdas,
    const MultiplierSpec* multiplier = nullptr,
    const std::function<void(std::size_t, const std::vector<double>&)>& per_lambda = {});

// Squared L2 norm of a torus field (h^d sum).
double torus_norm_squared(const GridSpec& spec, const std::vector<double>& values);

// Same operator as spectral_maximal with a mollified multiplier, computed by
// first forming f - f * psi_L on the whole torus and then applying the plain
// sphere averages.
std::vector<double> mollified_maximal_subtracted(const GridField& f, const NestedRule& rule,
                                                 const std::vector<double>& lambdas, double L);

// Pointwise mollified maximal operator at xs by quadrature on the extended
// field f - f * psi_L.
std::vector<double> mollified_maximal(const GridField& f, const NestedRule& rule,
                                      const LambdaGrid& grid, const MultiplierSpec& spec,
                                      const std::vector<Vec>& xs);

struct MaximalRatioReport {
  std::vector<double> ratios;  // ||A_* g||^2 / ||g||^2 per corpus member
  double max_ratio = 0.0;      // a lower bound for the operator norm squared
  bool dimension_flag = false;  // d < j + 2: no bound is expected
};
MaximalRatioReport l2_ratio_maximal(const std::vector<GridField>& corpus, const NestedRule& rule,
                                    const LambdaGrid& grid);

struct SquareFunctionValues {
  std::vector<double> I;
  std::vector<double> I_tilde;
};
// I(xi): outer average of |sigma^(xi)|^2. I~(xi): outer average of
// |xi . grad sigma^(xi)|^2, both from closed forms.
SquareFunctionValues square_functions(const NestedRule& rule, const std::vector<Vec>& xis);

// I along |xi| = r averaged over `directions` fixed unit directions.
std::vector<double> radial_square_function(const NestedRule& rule, const std::vector<double>& radii,
                                           int directions = 8);

struct EnvelopeBin {
  double lower = 0.0;
  double upper = 0.0;
  double sup_I = 0.0;        // sup of I over the bin
  double sup_I_tilde = 0.0;  // sup of I~ over the bin
  double envelope = 0.0;     // sup of I(xi) (1 + |xi|)^{(d - j) / 2}
};

struct EnvelopeReport {
  int d = 0;
  int j = 0;
  int level = 0;
  std::vector<EnvelopeBin> bins;
  double envelope_constant = 0.0;  // max envelope over the bins
  double tilde_constant = 0.0;     // max sup_I_tilde over the bins
  // sup_I_tilde strictly increases from bin to bin over the radii in
  // [growth_start, 100 growth_start].
  bool tilde_grows = false;
  double growth_start = 0.0;
  std::string to_csv() const;
};

// I and I~ on geometric bins of |xi| in [r_min, r_max]; every bin is sampled
// at `per_bin` radii and `directions` fixed unit directions.
EnvelopeReport square_function_envelope(const NestedRule& rule, double r_min, double r_max,
                                        int bins, int per_bin = 32, int directions = 4,
                                        double growth_start = 10.0);

struct Thm61Row {
  double L = 0.0;
  double relative_L = 0.0;  // L / lambda0
  double ratio = 0.0;       // corpus max of ||M_L f||^2 / ||f||^2
  double bound = 0.0;       // C_61 (L / lambda0)^{1/3}
  bool pass = false;
  std::vector<double> octave_ratios;  // sup restricted to each dyadic octave of lambda
};

struct Thm61Report {
  int d = 0;
  int j = 0;
  double lambda0 = 0.0;
  double lambda1 = 0.0;
  double constant = 0.0;  // C_61, the ratio at the largest L
  double slope = 0.0;     // least-squares slope of log ratio against log(L / lambda0)
  std::vector<Thm61Row> rows;
  bool pass = false;
  std::string to_csv() const;
};

// Ls must be positive and at most lambda0.
Thm61Report thm61_scaling(const std::vector<GridField>& corpus, const NestedRule& rule,
                          const LambdaGrid& grid, const std::vector<double>& Ls);

}  // namespace slab
