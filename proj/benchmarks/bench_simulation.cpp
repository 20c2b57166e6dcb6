#include "levyflat/models.hpp"
#include "levyflat/semigroup.hpp"
#include "levyflat/spde.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace levyflat;

namespace {

void BM_ShiftSemigroup(benchmark::State& state) {
  auto s = GridSpace::chebyshev(0.0, 10.0, static_cast<int>(state.range(0)));
  const Semigroup sg = Semigroup::shift(s);
  const HVector v = HVector::sample(s, [](double x) { return 0.04 - 0.02 * std::exp(-x / 2.5); });
  for (auto _ : state) benchmark::DoNotOptimize(sg.apply(1e-3, v)[0]);
}
BENCHMARK(BM_ShiftSemigroup)->Arg(32)->Arg(64)->Arg(256);

void BM_MatrixSemigroup(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto s = GridSpace::euclidean(n);
  const Semigroup sg = Semigroup::matrix_generator(s, -Eigen::MatrixXd::Identity(n, n));
  const HVector v(s, Eigen::VectorXd::Ones(n));
  for (auto _ : state) benchmark::DoNotOptimize(sg.apply(0.3, v)[0]);
}
BENCHMARK(BM_MatrixSemigroup)->Arg(8)->Arg(64);

void BM_SimulateHjmmPath(benchmark::State& state) {
  const ModelInstance m = build_hjmm_vasicek();
  const HVector h0 = m.manifold.point(m.path_starts[0]);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_mild(m.problem, h0, 1.0, 1e-3, seed++).states.size());
}
BENCHMARK(BM_SimulateHjmmPath)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
