#include <numbers>

#include <benchmark/benchmark.h>

#include "kkharm/energy/energy.hpp"
#include "kkharm/energy/flow.hpp"
#include "kkharm/energy/quadrature.hpp"
#include "kkharm/metric/koszul.hpp"
#include "kkharm/profile/solver.hpp"
#include "kkharm/tension/tension.hpp"
#include "kkharm/util/random.hpp"

using namespace kkharm;

namespace {

KKMetricSpec exp_metric() {
  KKMetricSpec s;
  s.B = ScalarProfile::exponential(1.0, -1.0);
  return s;
}

void BM_FieldCalculusAnalytic(benchmark::State& state) {
  const Manifold s3 = Manifold::sphere(3);
  const FieldSpec f = FieldSpec::killing({1, 2});
  Rng rng(1);
  const Vector p = rng.unit_vector(4);
  for (auto _ : state) benchmark::DoNotOptimize(field_calculus(s3, f, p));
}
BENCHMARK(BM_FieldCalculusAnalytic);

void BM_FieldCalculusStencil(benchmark::State& state) {
  const Manifold s3 = Manifold::sphere(3);
  const FieldSpec f = FieldSpec::killing({1, 2});
  Rng rng(1);
  const Vector p = rng.unit_vector(4);
  for (auto _ : state) benchmark::DoNotOptimize(field_calculus(s3, f, p, CalculusPath::kStencil));
}
BENCHMARK(BM_FieldCalculusStencil);

void BM_Tension(benchmark::State& state) {
  const Manifold s3 = Manifold::sphere(3);
  const FieldSpec f = FieldSpec::killing({1, 1});
  const KKMetricSpec g = preset("g_mr", {{"m", 2}, {"r", 0}});
  Rng rng(2);
  const Vector p = rng.unit_vector(4);
  for (auto _ : state) benchmark::DoNotOptimize(tension(s3, g, f, p));
}
BENCHMARK(BM_Tension);

void BM_Koszul(benchmark::State& state) {
  const KKMetricSpec cg = preset("cheeger-gromoll");
  for (auto _ : state) benchmark::DoNotOptimize(koszul_residuals(cg, 3, static_cast<int>(state.range(0)), 7));
}
BENCHMARK(BM_Koszul)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_ConstructProfile(benchmark::State& state) {
  ProfileProblem pr;
  pr.family = ProfileFamily::kKillingEven;
  pr.n = 4;
  pr.C = ScalarProfile::constant(0.1);
  for (auto _ : state) benchmark::DoNotOptimize(construct_B_from_C(pr));
}
BENCHMARK(BM_ConstructProfile)->Unit(benchmark::kMillisecond);

void BM_EnergyS3(benchmark::State& state) {
  const Manifold s3 = Manifold::sphere(3);
  const Quadrature q = sphere_quadrature(3, static_cast<int>(state.range(0)));
  const FieldSpec f = FieldSpec::killing({1, 1});
  for (auto _ : state) benchmark::DoNotOptimize(energy(s3, exp_metric(), f, q));
}
BENCHMARK(BM_EnergyS3)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_LatticeEnergy(benchmark::State& state) {
  const Manifold ct = Manifold::conformal_torus(Potential::product_sine(0.3));
  Rng rng(3);
  const DiscreteField f = random_unit_field(ct, static_cast<int>(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(lattice_energy(ct, exp_metric(), f));
}
BENCHMARK(BM_LatticeEnergy)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

void BM_UnitFlow(benchmark::State& state) {
  const Manifold t = Manifold::flat_torus(2 * std::numbers::pi, 2 * std::numbers::pi);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    Rng rng(4);
    benchmark::DoNotOptimize(unit_flow_torus(t, exp_metric(), random_unit_field(t, n, rng)));
  }
}
BENCHMARK(BM_UnitFlow)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
