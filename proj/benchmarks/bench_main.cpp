#include <benchmark/benchmark.h>

#include <complex>

#include "confmod/analytic.hpp"
#include "confmod/geometry.hpp"
#include "confmod/modsolver.hpp"

using namespace confmod;

static void BM_GrotzschMu(benchmark::State& state) {
  double r = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(analytic::grotzsch_mu(r));
    r = r < 0.98 ? r + 0.01 : 0.01;
  }
}
BENCHMARK(BM_GrotzschMu);

static void BM_HalfplaneMap(benchmark::State& state) {
  const analytic::Complex z(0.7, -1.3);
  for (auto _ : state) benchmark::DoNotOptimize(analytic::halfplane_to_U(1.0, z));
}
BENCHMARK(BM_HalfplaneMap);

static void BM_GammaLens(benchmark::State& state) {
  const auto d = geometry::fixtures::lens_channel();
  for (auto _ : state) benchmark::DoNotOptimize(analytic::gamma(d).value);
}
BENCHMARK(BM_GammaLens);

// One grid level of the annulus condenser: assembly plus direct solve.
static void BM_AnnulusLevel(benchmark::State& state) {
  const auto g = modsolver::condenser_for(modsolver::annulus_polylines(1.0, 2.0));
  const auto axes = modsolver::build_axes(modsolver::generic_plan(g), static_cast<int>(state.range(0)));
  for (auto _ : state) {
    const modsolver::GridCondenser c(g, axes);
    benchmark::DoNotOptimize(c.solve(modsolver::Backend::Cholesky, 1e-10, 0).energy);
  }
  state.counters["nodes"] = static_cast<double>(axes.nodes());
}
BENCHMARK(BM_AnnulusLevel)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

static void BM_AnnulusJacobiCG(benchmark::State& state) {
  const auto g = modsolver::condenser_for(modsolver::annulus_polylines(1.0, 2.0));
  const modsolver::GridCondenser c(g, modsolver::build_axes(modsolver::generic_plan(g), 0));
  for (auto _ : state) benchmark::DoNotOptimize(c.solve(modsolver::Backend::JacobiCG, 1e-10, 0).energy);
}
BENCHMARK(BM_AnnulusJacobiCG)->Unit(benchmark::kMillisecond);

static void BM_ResistorNetwork(benchmark::State& state) {
  const auto g = modsolver::condenser_for(modsolver::annulus_polylines(1.0, 2.0));
  const auto axes = modsolver::build_axes(modsolver::generic_plan(g), 1);
  for (auto _ : state) benchmark::DoNotOptimize(modsolver::resistor_network_modulus(g, axes));
}
BENCHMARK(BM_ResistorNetwork)->Unit(benchmark::kMillisecond);

static void BM_ChannelModuli(benchmark::State& state) {
  const auto d = geometry::fixtures::tilted_strip();
  modsolver::SolverOptions opts;
  opts.levels = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(modsolver::channel_moduli(d, static_cast<double>(state.range(0)), opts).omega.value);
  }
}
BENCHMARK(BM_ChannelModuli)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond)->Iterations(2);
BENCHMARK_MAIN();
