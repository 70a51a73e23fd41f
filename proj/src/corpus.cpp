#include "slab/corpus.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "slab/errors.hpp"

namespace slab {
namespace {

const char* kind_name(CorpusSpec::Kind k) {
  switch (k) {
    case CorpusSpec::Kind::random: return "random";
    case CorpusSpec::Kind::lattice: return "lattice";
    case CorpusSpec::Kind::shells: return "shells";
    case CorpusSpec::Kind::cantor: return "cantor";
    case CorpusSpec::Kind::file: return "file";
  }
  return "random";
}

CorpusSpec::Kind kind_from_name(const std::string& s) {
  if (s == "random") return CorpusSpec::Kind::random;
  if (s == "lattice") return CorpusSpec::Kind::lattice;
  if (s == "shells") return CorpusSpec::Kind::shells;
  if (s == "cantor") return CorpusSpec::Kind::cantor;
  if (s == "file") return CorpusSpec::Kind::file;
  throw ParamError("unknown corpus kind \"" + s + "\"");
}

// Membership of each 1-d cell center in the Cantor iterate on [-N/2, N/2].
std::vector<bool> cantor_axis(const GridSpec& grid, double ratio, int depth) {
  std::vector<std::pair<double, double>> intervals{{-0.5 * grid.N, 0.5 * grid.N}};
  for (int level = 0; level < depth; ++level) {
    std::vector<std::pair<double, double>> next;
    for (const auto& [lo, hi] : intervals) {
      const double keep = ratio * (hi - lo);
      if (keep < 2.0 * grid.h())
        throw ParamError("cantor depth leaves intervals narrower than two cells");
      next.emplace_back(lo, lo + keep);
      next.emplace_back(hi - keep, hi);
    }
    intervals = std::move(next);
  }
  std::vector<bool> in(static_cast<std::size_t>(grid.n), false);
  for (int i = 0; i < grid.n; ++i) {
    const double x = -0.5 * grid.N + (i + 0.5) * grid.h();
    for (const auto& [lo, hi] : intervals)
      if (x >= lo && x <= hi) in[static_cast<std::size_t>(i)] = true;
  }
  return in;
}

}  // namespace

CorpusSpec CorpusSpec::random_set(const GridSpec& grid, double density, std::uint64_t seed) {
  CorpusSpec s;
  s.kind = Kind::random;
  s.grid = grid;
  s.density = density;
  s.seed = seed;
  return s;
}

CorpusSpec CorpusSpec::lattice(const GridSpec& grid, double spacing) {
  CorpusSpec s;
  s.kind = Kind::lattice;
  s.grid = grid;
  s.spacing = spacing;
  return s;
}

CorpusSpec CorpusSpec::shells(const GridSpec& grid, std::vector<double> radii, double thickness) {
  CorpusSpec s;
  s.kind = Kind::shells;
  s.grid = grid;
  s.radii = std::move(radii);
  s.thickness = thickness;
  return s;
}

CorpusSpec CorpusSpec::cantor(const GridSpec& grid, double ratio, int depth) {
  CorpusSpec s;
  s.kind = Kind::cantor;
  s.grid = grid;
  s.ratio = ratio;
  s.depth = depth;
  return s;
}

CorpusSpec CorpusSpec::file(const std::string& path) {
  CorpusSpec s;
  s.kind = Kind::file;
  s.path = path;
  return s;
}

nlohmann::json CorpusSpec::to_json() const {
  nlohmann::json j{{"kind", kind_name(kind)}};
  if (kind != Kind::file) j["grid"] = {{"d", grid.d}, {"N", grid.N}, {"n", grid.n}};
  switch (kind) {
    case Kind::random: j["density"] = density; j["seed"] = seed; break;
    case Kind::lattice: j["spacing"] = spacing; break;
    case Kind::shells: j["radii"] = radii; j["thickness"] = thickness; break;
    case Kind::cantor: j["ratio"] = ratio; j["depth"] = depth; break;
    case Kind::file: j["path"] = path; break;
  }
  return j;
}

CorpusSpec CorpusSpec::from_json(const nlohmann::json& j) {
  try {
    CorpusSpec s;
    s.kind = kind_from_name(j.at("kind").get<std::string>());
    if (s.kind != Kind::file) {
      const auto& g = j.at("grid");
      s.grid = GridSpec{g.at("d").get<int>(), g.at("N").get<double>(), g.at("n").get<int>(), 2};
    }
    switch (s.kind) {
      case Kind::random:
        s.density = j.at("density").get<double>();
        s.seed = j.at("seed").get<std::uint64_t>();
        break;
      case Kind::lattice: s.spacing = j.at("spacing").get<double>(); break;
      case Kind::shells:
        s.radii = j.at("radii").get<std::vector<double>>();
        s.thickness = j.at("thickness").get<double>();
        break;
      case Kind::cantor:
        s.ratio = j.at("ratio").get<double>();
        s.depth = j.at("depth").get<int>();
        break;
      case Kind::file: s.path = j.at("path").get<std::string>(); break;
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ParamError(std::string("corpus spec: ") + e.what());
  }
}

std::vector<double> geometric_radii(double r0, double q, double rmax) {
  if (!(r0 > 0.0) || !(q > 1.0)) throw ParamError("geometric radii need r0 > 0 and q > 1");
  std::vector<double> r;
  for (double v = r0; v <= rmax; v *= q) r.push_back(v);
  return r;
}

std::vector<double> arithmetic_radii(double r0, double period, double rmax) {
  if (!(r0 >= 0.0) || !(period > 0.0)) throw ParamError("arithmetic radii need r0 >= 0 and period > 0");
  std::vector<double> r;
  for (int m = 0;; ++m) {
    const double v = r0 + m * period;
    if (v > rmax) break;
    r.push_back(v);
  }
  return r;
}

double shell_volume(int d, const std::vector<double>& radii, double thickness) {
  const double ball = std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
  double v = 0.0;
  for (double r : radii) {
    const double lo = std::max(0.0, r - 0.5 * thickness);
    v += ball * (std::pow(r + 0.5 * thickness, d) - std::pow(lo, d));
  }
  return v;
}

GridField generate(const CorpusSpec& spec) {
  if (spec.kind == CorpusSpec::Kind::file) {
    GridField f = read_set(spec.path);
    if (measure(f) == 0.0) throw ParamError(spec.path + " holds an empty set");
    return f;
  }
  spec.grid.validate();
  GridField a(spec.grid);
  const GridSpec& g = spec.grid;
  switch (spec.kind) {
    case CorpusSpec::Kind::random: {
      if (!(spec.density > 0.0 && spec.density <= 1.0)) throw ParamError("random density must lie in (0, 1]");
      std::mt19937_64 rng(spec.seed);
      std::uniform_real_distribution<double> unif;
      for (std::size_t i = 0; i < a.size(); ++i) a[i] = unif(rng) < spec.density ? 1.0 : 0.0;
      break;
    }
    case CorpusSpec::Kind::lattice: {
      const double steps = spec.spacing / g.h();
      const auto stride = static_cast<int>(std::lround(steps));
      if (stride < 1 || std::abs(steps - stride) > 1e-9)
        throw ParamError("lattice spacing must be a positive multiple of the cell width");
      int idx[kMaxDim];
      for (std::size_t i = 0; i < a.size(); ++i) {
        a.multi_index(i, idx);
        bool on = true;
        for (int ax = 0; ax < g.d; ++ax) on = on && idx[ax] % stride == 0;
        a[i] = on ? 1.0 : 0.0;
      }
      break;
    }
    case CorpusSpec::Kind::shells: {
      if (!(spec.thickness > 0.0)) throw ParamError("shell thickness must be positive");
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double r = a.cell_center(i).norm();
        for (double c : spec.radii)
          if (std::abs(r - c) <= 0.5 * spec.thickness) {
            a[i] = 1.0;
            break;
          }
      }
      break;
    }
    case CorpusSpec::Kind::cantor: {
      if (!(spec.ratio > 0.0 && spec.ratio < 0.5)) throw ParamError("cantor ratio must lie in (0, 1/2)");
      if (spec.depth < 0) throw ParamError("cantor depth must be >= 0");
      const auto axis = cantor_axis(g, spec.ratio, spec.depth);
      int idx[kMaxDim];
      for (std::size_t i = 0; i < a.size(); ++i) {
        a.multi_index(i, idx);
        bool on = true;
        for (int ax = 0; ax < g.d; ++ax) on = on && axis[static_cast<std::size_t>(idx[ax])];
        a[i] = on ? 1.0 : 0.0;
      }
      break;
    }
    case CorpusSpec::Kind::file: break;
  }
  if (measure(a) == 0.0) throw ParamError("corpus spec produced an empty set");
  return a;
}

double density(const GridField& a) { return measure(a) / a.spec().box_volume(); }

}  // namespace slab

namespace slab {

std::vector<GridField> probe_fields(const GridSpec& grid, double scale, int bands,
                                    std::uint64_t seed) {
  grid.validate();
  if (!(scale > 0.0) || bands < 0) throw ParamError("probe fields need scale > 0 and bands >= 0");
  std::vector<GridField> out;
  out.push_back(GridField::sample(grid, [&](const Vec& x) {
    return x.cwiseAbs().maxCoeff() < scale ? 1.0 : 0.0;
  }));
  out.push_back(GridField::sample(grid, [&](const Vec& x) { return x.norm() < scale ? 1.0 : 0.0; }));
  out.push_back(GridField::sample(grid, [&](const Vec& x) {
    return std::exp(-std::numbers::pi * x.squaredNorm() / (scale * scale));
  }));
  for (int b = 0; b < bands; ++b) {
    const double freq = std::ldexp(1.0, b) / scale;
    if (freq > grid.nyquist()) break;
    out.push_back(GridField::sample(grid, [&](const Vec& x) {
      return std::cos(2.0 * std::numbers::pi * freq * x[0]) * std::exp(-std::numbers::pi * x.squaredNorm() / (4.0 * scale * scale));
    }));
  }
  out.push_back(generate(CorpusSpec::random_set(grid, 0.5, seed)));
  return out;
}

}  // namespace slab
