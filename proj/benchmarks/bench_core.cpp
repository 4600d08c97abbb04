#include <benchmark/benchmark.h>

#include <vector>

#include "cqed/dynamics.hpp"
#include "cqed/integrator.hpp"
#include "cqed/observables.hpp"

namespace {

cqed::SystemState chaotic_state(int truncation) {
  cqed::ModelParams params;
  params.truncation = truncation;
  return cqed::init_state(0.0, 25.0, 10.0, cqed::AtomPrep{}, params);
}

void BM_Rhs(benchmark::State& st) {
  cqed::ModelParams params;
  params.truncation = static_cast<int>(st.range(0));
  auto s = chaotic_state(params.truncation);
  std::vector<double> dy(s.coords().size());
  for (auto _ : st) {
    cqed::rhs_into(s.coords(), dy, params);
    benchmark::DoNotOptimize(dy.data());
  }
  st.SetItemsProcessed(st.iterations());
}
BENCHMARK(BM_Rhs)->Arg(25)->Arg(100)->Arg(400);

void BM_Rk4Step(benchmark::State& st) {
  cqed::ModelParams params;
  params.truncation = static_cast<int>(st.range(0));
  auto s = chaotic_state(params.truncation);
  for (auto _ : st) {
    s = cqed::step(s, params, 0.005);
    benchmark::DoNotOptimize(s.coords().data());
  }
  st.SetItemsProcessed(st.iterations());
}
BENCHMARK(BM_Rk4Step)->Arg(100);

void BM_Observables(benchmark::State& st) {
  const auto s = chaotic_state(100);
  for (auto _ : st) {
    benchmark::DoNotOptimize(cqed::purity(s));
    benchmark::DoNotOptimize(cqed::entropy(s));
    benchmark::DoNotOptimize(cqed::inversion(s));
  }
}
BENCHMARK(BM_Observables);

void BM_Fidelity(benchmark::State& st) {
  const auto a = chaotic_state(100);
  auto b = a;
  b = cqed::step(b, cqed::ModelParams{}, 0.005);
  for (auto _ : st) benchmark::DoNotOptimize(cqed::fidelity(a, b));
}
BENCHMARK(BM_Fidelity);

}  // namespace

BENCHMARK_MAIN();
