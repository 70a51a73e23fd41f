#include "slab/multilinear.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <random>

#include "slab/errors.hpp"
#include "slab/mollifier.hpp"
#include "slab/parallel.hpp"
#include "slab/random.hpp"
#include "slab/rotation.hpp"

namespace slab {

NestedRule::NestedRule(const Simplex& s, int j, int level) : simplex_(s), j_(j), level_(level) {
  if (j < 1 || j > s.k()) throw DimensionError("operator index j must be in [1, k]");
  struct Partial {
    double weight;
    std::vector<Vec> frame;
  };
  std::vector<Partial> partial{{1.0, {}}};
  for (int i = 1; i < j; ++i) {
    std::vector<Partial> next;
    for (const auto& p : partial) {
      const ConfigSphere cs = config_sphere(s, i, Frame{p.frame});
      const UnitSphereRule& unit = unit_sphere_rule(cs.intrinsic_dim, level);
      for (std::size_t q = 0; q < unit.points.size(); ++q) {
        Partial child{p.weight * unit.weights[q], p.frame};
        child.frame.push_back(place_on_sphere(cs, unit.points[q]));
        next.push_back(std::move(child));
      }
    }
    partial = std::move(next);
  }
  for (auto& p : partial) {
    OuterNode node;
    node.weight = p.weight;
    node.sphere = config_sphere(s, j, Frame{p.frame});
    node.frame = std::move(p.frame);
    outer_.push_back(std::move(node));
  }
  inner_ = &unit_sphere_rule(s.dim() - j, level);
}

std::vector<Vec> sample_cell_centers(const GridSpec& spec, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, spec.cells() - 1);
  const GridField probe(spec);
  std::vector<Vec> xs;
  xs.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) xs.push_back(probe.cell_center(pick(rng)));
  return xs;
}

std::vector<Vec> all_cell_centers(const GridSpec& spec) {
  const GridField probe(spec);
  std::vector<Vec> xs(probe.size());
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = probe.cell_center(i);
  return xs;
}

namespace {

void check_inputs(const std::vector<const GridField*>& inputs, const NestedRule& rule) {
  if (static_cast<int>(inputs.size()) != rule.j())
    throw DimensionError("number of inputs must equal the operator index j");
  for (const auto* g : inputs)
    if (g->spec().d != rule.dim()) throw DimensionError("input and simplex dimensions differ");
}

double reach(const NestedRule& rule, double lambda) {
  return std::abs(lambda) * rule.simplex().max_vertex_norm();
}

}  // namespace

double nested_average(const std::vector<const GridField*>& inputs, const Vec& x, double lambda,
                      const NestedRule& rule) {
  check_inputs(inputs, rule);
  for (const auto* g : inputs) require_clearance(g->spec(), x, reach(rule, lambda));
  const GridField& last = *inputs.back();
  const UnitSphereRule& unit = rule.inner();
  double total = 0.0;
  for (const auto& node : rule.outer()) {
    double prefix = node.weight;
    for (std::size_t i = 0; i < node.frame.size() && prefix != 0.0; ++i)
      prefix *= inputs[i]->interpolate(x - lambda * node.frame[i]);
    if (prefix == 0.0) continue;
    double inner = 0.0;
    for (std::size_t q = 0; q < unit.points.size(); ++q)
      inner += unit.weights[q] * last.interpolate(x - lambda * place_on_sphere(node.sphere, unit.points[q]));
    total += prefix * inner;
  }
  return total;
}

std::vector<double> nested_average(const std::vector<const GridField*>& inputs,
                                   const std::vector<Vec>& xs, double lambda,
                                   const NestedRule& rule) {
  std::vector<double> out(xs.size());
  parallel_for(xs.size(), [&](std::size_t i) { out[i] = nested_average(inputs, xs[i], lambda, rule); });
  return out;
}

double abs_nested_average(const GridField& g, const Vec& x, double lambda, const NestedRule& rule) {
  if (g.spec().d != rule.dim()) throw DimensionError("input and simplex dimensions differ");
  require_clearance(g.spec(), x, reach(rule, lambda));
  const UnitSphereRule& unit = rule.inner();
  double total = 0.0;
  for (const auto& node : rule.outer()) {
    double inner = 0.0;
    for (std::size_t q = 0; q < unit.points.size(); ++q)
      inner += unit.weights[q] * g.interpolate(x - lambda * place_on_sphere(node.sphere, unit.points[q]));
    total += node.weight * std::abs(inner);
  }
  return total;
}

std::vector<double> abs_nested_average(const GridField& g, const std::vector<Vec>& xs,
                                       double lambda, const NestedRule& rule) {
  std::vector<double> out(xs.size());
  parallel_for(xs.size(), [&](std::size_t i) { out[i] = abs_nested_average(g, xs[i], lambda, rule); });
  return out;
}

Estimate indicator_sum(const GridField& a,
                       const std::function<std::vector<double>(const std::vector<Vec>&)>& eval,
                       bool full_grid, int samples, std::uint64_t seed) {
  if (!a.is_indicator()) throw ParamError("expected an indicator field");
  const double hd = a.spec().cell_volume();
  std::vector<std::size_t> cells;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != 0.0) cells.push_back(i);
  Estimate e;
  if (cells.empty()) return e;
  if (full_grid || (samples > 0 && static_cast<std::size_t>(samples) >= cells.size())) {
    std::vector<Vec> xs;
    xs.reserve(cells.size());
    for (auto c : cells) xs.push_back(a.cell_center(c));
    e.value = hd * pairwise_sum(eval(xs));
    return e;
  }
  if (samples < 2) throw ParamError("stratified sum needs at least two strata");
  const std::size_t strata = static_cast<std::size_t>(samples);
  std::vector<Vec> xs(strata);
  std::vector<double> width(strata);
  for (std::size_t s = 0; s < strata; ++s) {
    const std::size_t lo = s * cells.size() / strata;
    const std::size_t hi = (s + 1) * cells.size() / strata;
    auto rng = stream_engine(seed, s);
    std::uniform_int_distribution<std::size_t> pick(lo, hi - 1);
    xs[s] = a.cell_center(cells[pick(rng)]);
    width[s] = static_cast<double>(hi - lo);
  }
  const auto vals = eval(xs);
  std::vector<double> scaled(strata);
  for (std::size_t s = 0; s < strata; ++s) scaled[s] = width[s] * vals[s];
  e.value = hd * pairwise_sum(scaled);
  // Variance from differences of neighbouring strata.
  std::vector<double> diff;
  for (std::size_t s = 0; s + 1 < strata; s += 2) {
    const double dv = vals[s] - vals[s + 1];
    diff.push_back(0.5 * dv * dv);
  }
  double var = 0.0;
  for (std::size_t s = 0; s < strata; ++s) var += width[s] * width[s];
  var *= pairwise_sum(diff) / static_cast<double>(diff.size());
  e.stderr_ = hd * std::sqrt(var);
  e.samples = samples;
  return e;
}

Estimate count_functional(const GridField& a, double lambda, const NestedRule& rule, int samples,
                          std::uint64_t seed) {
  if (!a.is_indicator()) throw ParamError("count functional needs an indicator field");
  if (rule.j() != rule.simplex().k()) throw DimensionError("count functional uses j = k");
  const std::vector<const GridField*> inputs(static_cast<std::size_t>(rule.j()), &a);
  return indicator_sum(
      a, [&](const std::vector<Vec>& xs) { return nested_average(inputs, xs, lambda, rule); },
      a.spec().d == 2, samples, seed);
}

DifferenceReport difference_bound_check(const GridField& g, double eta, double lambda,
                                        const NestedRule& rule, const std::vector<Vec>& xs) {
  if (!(eta > 0.0 && eta <= 1.0)) throw PreconditionError("eta must lie in (0, 1]");
  const int j = rule.j();
  const Mollifier& m = mollifier(g.spec().d);
  const GridField f1 = inverse_transform_extended(mollify(forward_transform(g), m, lambda / eta));
  std::vector<const GridField*> inputs(static_cast<std::size_t>(j - 1), &g);
  inputs.push_back(&f1);
  std::unique_ptr<NestedRule> lower;
  if (j > 1) lower = std::make_unique<NestedRule>(rule.simplex(), j - 1, rule.level());
  const std::vector<const GridField*> lower_inputs(static_cast<std::size_t>(j - 1), &g);
  std::vector<double> diff(xs.size());
  parallel_for(xs.size(), [&](std::size_t i) {
    const double full = nested_average(inputs, xs[i], lambda, rule);
    const double prev = lower ? nested_average(lower_inputs, xs[i], lambda, *lower) : 1.0;
    diff[i] = std::abs(full - f1.interpolate(xs[i]) * prev);
  });
  DifferenceReport r;
  r.eta = eta;
  r.points = static_cast<int>(xs.size());
  for (double v : diff) r.sup_difference = std::max(r.sup_difference, v);
  r.ratio = r.sup_difference / eta;
  return r;
}

}  // namespace slab

namespace slab {

nlohmann::json EquivalenceReport::to_json() const {
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& c : cases) {
    nlohmann::json verts = nlohmann::json::array();
    for (const auto& v : c.vertices) verts.push_back(std::vector<double>(v.data(), v.data() + v.size()));
    cs.push_back({{"vertices", verts},
                  {"x", std::vector<double>(c.x.data(), c.x.data() + c.x.size())},
                  {"lambda", c.lambda},
                  {"nested", c.nested},
                  {"nested_error", c.nested_error},
                  {"monte_carlo", c.monte_carlo},
                  {"mc_stderr", c.mc_stderr},
                  {"combined_stderr", c.combined_stderr},
                  {"z", c.z}});
  }
  return {{"d", d}, {"j", j}, {"max_z", max_z}, {"cases", cs}};
}

EquivalenceReport equivalence_sweep(int d, int j, int cases, int draws, int level, int n,
                                    std::uint64_t seed) {
  if (j < 1 || j >= d) throw DimensionError("equivalence needs 1 <= j < d");
  if (cases < 1 || draws < 2) throw ParamError("equivalence needs cases >= 1 and draws >= 2");
  const GridSpec grid{d, 8.0, n, 2};
  grid.validate();
  const double width = 2.5;
  auto rng = stream_engine(seed, 0);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  auto random_vec = [&](double scale) {
    Vec v(d);
    for (int a = 0; a < d; ++a) v[a] = scale * uniform(rng);
    return v;
  };
  EquivalenceReport report;
  report.d = d;
  report.j = j;
  for (int c = 0; c < cases; ++c) {
    // Rejection keeps simplices well conditioned and inside the padded box.
    std::optional<Simplex> simplex;
    while (!simplex) {
      std::vector<Vec> raw;
      for (int i = 0; i < j; ++i) {
        Vec v(d);
        for (int a = 0; a < d; ++a) v[a] = normal(rng);
        raw.push_back(v);
      }
      try {
        Simplex s = normalize_simplex(raw);
        if (s.max_vertex_norm() <= 2.0 && s.gram_determinant() >= 0.05) simplex = s;
      } catch (const DegenerateSimplex&) {
      }
    }
    std::vector<GridField> fields;
    for (int i = 0; i < j; ++i) {
      const Vec center = random_vec(1.5);
      fields.push_back(GridField::sample(grid, [&](const Vec& y) {
        return std::exp(-std::numbers::pi * (y - center).squaredNorm() / (width * width));
      }));
    }
    std::vector<const GridField*> inputs;
    for (const auto& f : fields) inputs.push_back(&f);
    EquivalenceCase ec;
    ec.vertices = simplex->vertices();
    ec.x = random_vec(1.0);
    ec.lambda = 1.0 + 0.5 * uniform(rng);
    const NestedRule coarse(*simplex, j, level), fine(*simplex, j, level + 1);
    ec.nested = nested_average(inputs, ec.x, ec.lambda, fine);
    ec.nested_error = std::abs(ec.nested - nested_average(inputs, ec.x, ec.lambda, coarse));
    HaarSampler sampler(d, seed, 1 + static_cast<std::uint64_t>(c) * static_cast<std::uint64_t>(draws));
    const McEstimate mc = mc_multilinear(inputs, ec.x, ec.lambda, *simplex, draws, sampler);
    ec.monte_carlo = mc.estimate;
    ec.mc_stderr = mc.stderr_;
    ec.combined_stderr = std::hypot(ec.mc_stderr, ec.nested_error);
    ec.z = ec.combined_stderr > 0.0 ? std::abs(ec.nested - ec.monte_carlo) / ec.combined_stderr : 0.0;
    report.max_z = std::max(report.max_z, ec.z);
    report.cases.push_back(std::move(ec));
  }
  return report;
}

}  // namespace slab
