#include "levyflat/manifold.hpp"
#include "levyflat/models.hpp"
#include "levyflat/subspace.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace levyflat;

namespace {

std::vector<HVector> random_columns(const SpacePtr& s, int count, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<HVector> out;
  for (int j = 0; j < count; ++j) {
    Eigen::VectorXd v(s->dim());
    for (auto& x : v) x = g(rng);
    out.emplace_back(s, v);
  }
  return out;
}

void BM_Intersect(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int count = static_cast<int>(state.range(1));
  auto s = GridSpace::chebyshev(0.0, 10.0, n);
  std::mt19937_64 rng(1);
  const auto common = random_columns(s, 2, rng);
  std::vector<Subspace> spaces;
  for (int i = 0; i < count; ++i) {
    auto cols = random_columns(s, 3, rng);
    cols.insert(cols.end(), common.begin(), common.end());
    spaces.push_back(orthonormalize(cols));
  }
  for (auto _ : state) benchmark::DoNotOptimize(intersect(spaces).dim());
}
BENCHMARK(BM_Intersect)->Args({16, 8})->Args({64, 32})->Args({64, 128});

void BM_ClosestPointHjmm(benchmark::State& state) {
  const ModelInstance m = build_hjmm_vasicek();
  const ChartPoint start{0, Eigen::Vector2d(1.0, 0.1)};
  const HVector target = m.manifold.point(ChartPoint{0, Eigen::Vector2d(1.2, 0.05)});
  for (auto _ : state) benchmark::DoNotOptimize(closest_point(m.manifold, target, start).distance);
}
BENCHMARK(BM_ClosestPointHjmm);

void BM_ClosestPointSine(benchmark::State& state) {
  const ModelInstance m = build_sine_counterexample();
  const HVector target(m.manifold.ambient(), Eigen::Vector2d(0.3, 0.6));
  const ChartPoint start{0, Eigen::VectorXd::Constant(1, 0.25)};
  for (auto _ : state) benchmark::DoNotOptimize(closest_point(m.manifold, target, start).distance);
}
BENCHMARK(BM_ClosestPointSine);

}  // namespace
