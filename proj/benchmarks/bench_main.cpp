#include <benchmark/benchmark.h>

#include "histdirac/clock_spectrum.hpp"
#include "histdirac/external_field.hpp"
#include "histdirac/history_state.hpp"
#include "histdirac/lightcone_density.hpp"
#include "histdirac/spinor_algebra.hpp"

using namespace histdirac;

static void BM_SpinorRep(benchmark::State& state) {
  const auto w = spinor::BoostParams::boost(Eigen::Vector3d(0.3, -0.2, 0.9));
  for (auto _ : state) benchmark::DoNotOptimize(spinor::spinor_rep(w));
}
BENCHMARK(BM_SpinorRep);

static void BM_PsiClosed(benchmark::State& state) {
  double x = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lightcone::psi_closed(x, 1.7, 0.1, 1.0));
    x += 1e-9;
  }
}
BENCHMARK(BM_PsiClosed);

static void BM_PsiQuadrature(benchmark::State& state) {
  const double eps = state.range(0) * 1e-3;
  for (auto _ : state) benchmark::DoNotOptimize(lightcone::psi_quadrature(0.4, 1.3, eps, 1.0));
}
BENCHMARK(BM_PsiQuadrature)->Arg(1)->Arg(100)->Arg(1000)->Unit(benchmark::kMicrosecond);

static void BM_DensityGridQuadrature(benchmark::State& state) {
  lightcone::DensityParams p;
  p.method = lightcone::DensityMethod::quadrature;
  p.eps = 1e-3;
  for (auto _ : state)
    benchmark::DoNotOptimize(lightcone::make_density_grid(p, {-4.75, 0.5, 20}, {-5.0, 0.5, 21}));
}
BENCHMARK(BM_DensityGridQuadrature)->Unit(benchmark::kMillisecond);

static void BM_PurityRatioNumeric(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(clock::purity_ratio_numeric(1.0, 1.0, 0.5));
}
BENCHMARK(BM_PurityRatioNumeric)->Unit(benchmark::kMillisecond);

static void BM_DiracNorm(benchmark::State& state) {
  const auto g = history::MomentumDistribution::gaussian(1.0, Eigen::Vector3d(0.3, 0.0, 0.2), 0.4);
  for (auto _ : state) benchmark::DoNotOptimize(history::dirac_norm(g));
}
BENCHMARK(BM_DiracNorm)->Unit(benchmark::kMillisecond);

static void BM_FieldLevels(benchmark::State& state) {
  const field::Lattice lat{int(state.range(0)), 10.0, field::Boundary::hard_wall};
  const auto pot = field::StaticPotential::square_well(0.5, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(field::positive_levels(field::build_hamiltonian(pot, 1.0, lat), 5));
}
BENCHMARK(BM_FieldLevels)->Arg(500)->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
