// Serial reference against the OpenMP kernels on the integrals that dominate a run.

#include <benchmark/benchmark.h>

#include "graphmass/graphgeom.hpp"
#include "graphmass/mass.hpp"
#include "graphmass/quad.hpp"
#include "graphmass/scenarios.hpp"

using namespace graphmass;

namespace {

quad::Exec exec_of(const benchmark::State& st) { return st.range(0) ? quad::Exec::Parallel : quad::Exec::Serial; }

const mass::Scenario& schwarzschild(int n) {
  static const mass::Scenario s3 = scenarios::build("schwarzschild3", {}, {});
  static const mass::Scenario s5 = scenarios::build("schwarzschild_n", {{{"n", 5}}, {}}, {});
  return n == 3 ? s3 : s5;
}

// flux integrand of the mass over one sphere
void BM_FluxSphere(benchmark::State& st) {
  const int n = static_cast<int>(st.range(1));
  const auto& s = schwarzschild(n);
  const auto rule = quad::sphere_rule_for(n, s.quad, false);
  const quad::PointFn fn = [&](std::span<const double> x) { return geom::scalar_curvature(*s.field, x); };
  for (auto _ : st) benchmark::DoNotOptimize(quad::sphere_integrate(fn, 50.0, rule, {}, exec_of(st)));
  st.counters["nodes"] = static_cast<double>(rule.size());
}
BENCHMARK(BM_FluxSphere)->ArgsProduct({{0, 1}, {3, 5}})->Unit(benchmark::kMillisecond);

// bulk integral of R outside the horizon
void BM_BulkVolume(benchmark::State& st) {
  mass::Scenario s = scenarios::build("bump", {{{"alpha", 0.1}}, {}}, {});
  s.quad.exec = exec_of(st);
  for (auto _ : st) benchmark::DoNotOptimize(mass::bulk_mass(s));
}
BENCHMARK(BM_BulkVolume)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_BulkWithHorizon(benchmark::State& st) {
  mass::Scenario s = scenarios::build("schwarzschild_perturbed", {}, {});
  s.quad.exec = exec_of(st);
  for (auto _ : st) benchmark::DoNotOptimize(mass::bulk_mass(s));
}
BENCHMARK(BM_BulkWithHorizon)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
