#include "slab/rotation.hpp"

#include <cmath>

#include "slab/errors.hpp"
#include "slab/parallel.hpp"
#include "slab/random.hpp"

namespace slab {

HaarSampler::HaarSampler(int d, std::uint64_t seed, std::uint64_t counter)
    : d_(d), seed_(seed), counter_(counter) {
  if (d < 2 || d > kMaxDim) throw DimensionError("rotation dimension must be in [2, 4]");
}

Rotation HaarSampler::draw() { return draw_at(counter_++); }

std::uint64_t HaarSampler::reserve(std::uint64_t count) {
  const std::uint64_t first = counter_;
  counter_ += count;
  return first;
}

Rotation HaarSampler::draw_at(std::uint64_t counter) const {
  auto rng = stream_engine(seed_, counter);
  std::normal_distribution<double> normal;
  for (;;) {
    Mat g(d_, d_);
    for (int c = 0; c < d_; ++c)
      for (int r = 0; r < d_; ++r) g(r, c) = normal(rng);
    Eigen::HouseholderQR<Mat> qr(g);
    const Mat rmat = qr.matrixQR().triangularView<Eigen::Upper>();
    bool singular = false;
    for (int i = 0; i < d_; ++i)
      if (std::abs(rmat(i, i)) < 1e-12) singular = true;
    if (singular) continue;
    Mat q = qr.householderQ() * Mat::Identity(d_, d_);
    for (int i = 0; i < d_; ++i)
      if (rmat(i, i) < 0.0) q.col(i) = -q.col(i);
    if (q.determinant() < 0.0) q.col(d_ - 1) = -q.col(d_ - 1);
    return Rotation(q);
  }
}

void require_clearance(const GridSpec& spec, const Vec& x, double reach) {
  if (x.size() != spec.d) throw DimensionError("point dimension does not match grid");
  const double w = spec.padded_half_width();
  for (int a = 0; a < spec.d; ++a)
    if (!(std::abs(x[a]) + reach <= w))
      throw OutOfBox("rotated configuration can leave the padded box");
}

std::vector<PinProbability> pin_probability_sweep(const GridField& a, const Vec& x,
                                                  const std::vector<double>& lambdas,
                                                  const Simplex& s, int samples,
                                                  HaarSampler& sampler) {
  if (samples < 1) throw ParamError("pin probability needs at least one sample");
  if (s.dim() != a.spec().d || sampler.dim() != a.spec().d)
    throw DimensionError("simplex, sampler and set dimensions differ");
  double lmax = 0.0;
  for (double l : lambdas) lmax = std::max(lmax, std::abs(l));
  require_clearance(a.spec(), x, lmax * s.max_vertex_norm());
  const std::uint64_t first = sampler.reserve(static_cast<std::uint64_t>(samples));
  const std::size_t nl = lambdas.size();
  std::vector<double> hits(static_cast<std::size_t>(samples) * nl, 0.0);
  parallel_for(static_cast<std::size_t>(samples), [&](std::size_t i) {
    const Rotation u = sampler.draw_at(first + i);
    std::vector<Vec> rotated;
    for (const auto& v : s.vertices()) rotated.push_back(u.apply(v));
    for (std::size_t l = 0; l < nl; ++l) {
      bool inside = true;
      for (const auto& rv : rotated) {
        if (a.interpolate(x + lambdas[l] * rv) < 0.5) {
          inside = false;
          break;
        }
      }
      hits[l * static_cast<std::size_t>(samples) + i] = inside ? 1.0 : 0.0;
    }
  });
  std::vector<PinProbability> out;
  for (std::size_t l = 0; l < nl; ++l) {
    const std::span<const double> part(hits.data() + l * static_cast<std::size_t>(samples),
                                       static_cast<std::size_t>(samples));
    PinProbability p;
    p.x = x;
    p.lambda = lambdas[l];
    p.samples = samples;
    p.estimate = pairwise_sum(part) / samples;
    p.stderr_ = std::sqrt(p.estimate * (1.0 - p.estimate) / samples);
    out.push_back(p);
  }
  return out;
}

PinProbability pin_probability(const GridField& a, const Vec& x, double lambda, const Simplex& s,
                               int samples, HaarSampler& sampler) {
  return pin_probability_sweep(a, x, {lambda}, s, samples, sampler).front();
}

McEstimate mc_multilinear(const std::vector<const GridField*>& inputs, const Vec& x,
                          double lambda, const Simplex& s, int samples, HaarSampler& sampler) {
  if (samples < 2) throw ParamError("Monte Carlo estimate needs at least two samples");
  if (inputs.empty() || static_cast<int>(inputs.size()) > s.k())
    throw DimensionError("number of inputs must be in [1, k]");
  for (const auto* g : inputs) {
    if (g->spec().d != s.dim()) throw DimensionError("input and simplex dimensions differ");
    require_clearance(g->spec(), x, std::abs(lambda) * s.max_vertex_norm());
  }
  const std::uint64_t first = sampler.reserve(static_cast<std::uint64_t>(samples));
  std::vector<double> value(static_cast<std::size_t>(samples));
  parallel_for(value.size(), [&](std::size_t i) {
    const Rotation u = sampler.draw_at(first + i);
    double prod = 1.0;
    for (std::size_t m = 0; m < inputs.size() && prod != 0.0; ++m)
      prod *= inputs[m]->interpolate(x - lambda * u.apply(s.vertex(static_cast<int>(m))));
    value[i] = prod;
  });
  const double mean = pairwise_sum(value) / samples;
  std::vector<double> dev(value.size());
  for (std::size_t i = 0; i < value.size(); ++i) dev[i] = (value[i] - mean) * (value[i] - mean);
  McEstimate e;
  e.estimate = mean;
  e.samples = samples;
  e.stderr_ = std::sqrt(pairwise_sum(dev) / (samples - 1) / samples);
  return e;
}

}  // namespace slab
