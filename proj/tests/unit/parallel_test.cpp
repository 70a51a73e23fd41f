#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "slab/corpus.hpp"
#include "slab/maximal.hpp"
#include "slab/multilinear.hpp"
#include "slab/parallel.hpp"

using namespace slab;

namespace {

struct ThreadGuard {
  int saved = thread_count();
  ~ThreadGuard() { set_thread_count(saved); }
};

}  // namespace

TEST(Parallel, CoversEveryIndexOnce) {
  ThreadGuard guard;
  set_thread_count(3);
  std::vector<int> hits(1001, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
}

TEST(Parallel, PairwiseSumAccurate) {
  std::vector<double> v(100000, 0.1);
  EXPECT_NEAR(pairwise_sum(v), 10000.0, 1e-9);
  EXPECT_EQ(pairwise_sum(std::vector<double>{}), 0.0);
}

// Results do not depend on the worker count.
TEST(ParallelProperty, ThreadCountInvariance) {
  ThreadGuard guard;
  const GridSpec g{2, 32.0, 32, 2};
  const GridField a = generate(CorpusSpec::random_set(g, 0.5, 3));
  const NestedRule rule(normalize_simplex({(Vec(2) << 1.0, 0.0).finished()}), 1, 4);
  std::vector<std::vector<double>> runs;
  std::vector<double> counts;
  for (int threads : {1, 2, 3}) {
    set_thread_count(threads);
    runs.push_back(spectral_maximal(forward_transform(a), rule, {2.0, 3.0}));
    counts.push_back(count_functional(a, 2.0, rule).value);
  }
  for (std::size_t r = 1; r < runs.size(); ++r) {
    EXPECT_EQ(counts[r], counts[0]);
    for (std::size_t i = 0; i < runs[0].size(); ++i) EXPECT_NEAR(runs[r][i], runs[0][i], 1e-12);
  }
}
