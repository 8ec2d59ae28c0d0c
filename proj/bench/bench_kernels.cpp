#include <benchmark/benchmark.h>

#include "hxc/decomposition.hpp"
#include "hxc/dyadic.hpp"
#include "hxc/linearized.hpp"

using namespace hxc;

namespace {

Exec policy(const benchmark::State& state) { return state.range(1) ? Exec::parallel : Exec::serial; }

LinearizerField bench_v(int n_log2) {
  LinearizerSpec spec;
  spec.kind = RegularityKind::lip_2d;
  spec.lipschitz = 1.5;
  return generate_linearizer(spec, 3, n_log2);
}

void BM_bucketed(benchmark::State& state) {
  const int n_log2 = static_cast<int>(state.range(0));
  const auto f = random_field(n_log2, 1);
  const auto v = bench_v(n_log2);
  const auto m = make_bump_profile(0.25);
  for (auto _ : state)
    benchmark::DoNotOptimize(apply_linearized_bucketed(f, v, m, -1.0, Quantize::exact, Orientation::first_scaled,
                                                       true, policy(state)));
  state.SetLabel(state.range(1) ? "parallel" : "serial");
}

void BM_bruteforce(benchmark::State& state) {
  const int n_log2 = static_cast<int>(state.range(0));
  const auto f = random_field(n_log2, 1);
  const auto v = bench_v(n_log2);
  const auto m = make_bump_profile(0.25);
  for (auto _ : state)
    benchmark::DoNotOptimize(apply_linearized_bruteforce(f, v, m, -1.0, Orientation::first_scaled, true, policy(state)));
  state.SetLabel(state.range(1) ? "parallel" : "serial");
}

void BM_decompose(benchmark::State& state) {
  const int n_log2 = static_cast<int>(state.range(0));
  const auto fam = make_lp_family(1.0, n_log2);
  const auto f = resolved_part(random_field(n_log2, 2));
  const auto v = bench_v(n_log2);
  const auto m = make_bump_profile(0.5);
  for (auto _ : state) benchmark::DoNotOptimize(decompose(f, v, fam, m, policy(state)));
  state.SetLabel(state.range(1) ? "parallel" : "serial");
}

void BM_selection_stability(benchmark::State& state) {
  const int n_log2 = static_cast<int>(state.range(0));
  const auto v = generate_dyadic_linearizer(n_log2, 0.5, DyadicVariant::rows, 5);
  for (auto _ : state) benchmark::DoNotOptimize(check_selection_stability(v, 0.5, 1.0, DyadicVariant::rows));
}

} // namespace

BENCHMARK(BM_bucketed)->ArgsProduct({{5, 6, 7}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_bruteforce)->ArgsProduct({{4, 5}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_decompose)->ArgsProduct({{5, 6}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_selection_stability)->Arg(5)->Arg(6)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
