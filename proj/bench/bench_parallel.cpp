// Serial against OpenMP versions of the parallel kernels.

#include <benchmark/benchmark.h>

#include "gitpol/constants.hpp"
#include "gitpol/embedding.hpp"
#include "gitpol/stability.hpp"

using namespace gitpol;

namespace {

SystemPtr rect_system() { return build_line_bundle_system(ProblemSpec{3, {-2, -1}, {1, 1}, {0, 1}, {1, 3}}); }
SystemPtr two_two_system() { return build_line_bundle_system(ProblemSpec{3, {-2, -1}, {2, 2}, {0, 1}, {2, 5}}); }

Polarization rect_pol() {
  const Rational lam2 = make_rational(9, 10), mu1 = make_rational(4, 5);
  return Polarization{{1 - lam2, lam2}, {mu1, (1 - mu1) / 3}};
}

void BM_walls(benchmark::State& st, bool parallel) {
  const Chart chart = Chart::standard({2, 3}, {4, 1});
  for (auto _ : st)
    benchmark::DoNotOptimize(parallel ? singular_polarizations(chart) : singular_polarizations_serial(chart));
}

void BM_lower_bound(benchmark::State& st, bool parallel) {
  const ConstantQuery q = c_query(two_two_system(), 1);
  for (auto _ : st)
    benchmark::DoNotOptimize(parallel ? sampled_lower_bound(q, 9, 100) : sampled_lower_bound_serial(q, 9, 100));
}

void BM_search(benchmark::State& st, bool parallel) {
  SystemPtr sys = rect_system();
  const MorphismElement w = random_morphism(sys, 4, 3);
  const Polarization pol = rect_pol();
  for (auto _ : st)
    benchmark::DoNotOptimize(parallel ? destabilizer_search(w, pol) : destabilizer_search_serial(w, pol));
}

void BM_big_search(benchmark::State& st, bool parallel) {
  SystemPtr sys = rect_system();
  const BigSetting big = build_big(sys);
  const BigElement bw = zeta(big, random_morphism(sys, 4, 3));
  const AssociatedPolarization assoc = associated(rect_pol(), *sys);
  for (auto _ : st)
    benchmark::DoNotOptimize(parallel ? big_destabilizer_search(big, bw, assoc, 400)
                                      : big_destabilizer_search_serial(big, bw, assoc, 400));
}

}  // namespace

BENCHMARK_CAPTURE(BM_walls, serial, false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_walls, parallel, true)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_lower_bound, serial, false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_lower_bound, parallel, true)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_search, serial, false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_search, parallel, true)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_big_search, serial, false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_big_search, parallel, true)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
