// Microbenchmarks for the hot paths: masked forward evaluation (the GA's
// fitness bottleneck), the analytic gradient, and the per-generation GA
// operators.

#include <benchmark/benchmark.h>

#include <vector>

#include "slt/dataset.hpp"
#include "slt/ga.hpp"
#include "slt/network.hpp"
#include "slt/rng.hpp"

namespace {

using namespace slt;

struct Fixture {
  NetworkArch arch = named_arch('D', 2, 2);
  Dataset data = gen_moons(7500, 0.07, 1);
  ParamVector params =
      init_network(arch, InitScheme::uniform(-1.0, 1.0), 2);
  BitMask mask;

  Fixture() {
    Rng rng(3);
    mask = ga::generate_individual(arch.weight_count(), 0.5, rng);
  }
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

void BM_forward_dense(benchmark::State& state) {
  Fixture& f = fixture();
  for (auto _ : state)
    benchmark::DoNotOptimize(accuracy(MaskedNetwork(f.params), f.data));
  state.SetItemsProcessed(state.iterations() * f.data.size());
}
BENCHMARK(BM_forward_dense);

void BM_forward_masked(benchmark::State& state) {
  Fixture& f = fixture();
  for (auto _ : state)
    benchmark::DoNotOptimize(
        accuracy(MaskedNetwork(f.params, f.mask), f.data));
  state.SetItemsProcessed(state.iterations() * f.data.size());
}
BENCHMARK(BM_forward_masked);

void BM_gradient(benchmark::State& state) {
  Fixture& f = fixture();
  const Dataset batch = f.data.subset([] {
    std::vector<int> rows(256);
    for (int i = 0; i < 256; ++i) rows[static_cast<std::size_t>(i)] = i;
    return rows;
  }());
  for (auto _ : state)
    benchmark::DoNotOptimize(gradient(f.params, batch, 1e-4));
}
BENCHMARK(BM_gradient);

void BM_evaluate_population(benchmark::State& state) {
  Fixture& f = fixture();
  ga::EvalContext ctx;
  ctx.params = &f.params;
  ctx.train = &f.data;
  ctx.workers = static_cast<int>(state.range(0));
  Rng rng(4);
  for (auto _ : state) {
    state.PauseTiming();
    std::vector<ga::Individual> pop;
    for (int i = 0; i < 50; ++i) {
      ga::Individual ind;
      ind.mask = ga::generate_individual(f.arch.weight_count(), 0.5, rng);
      pop.push_back(std::move(ind));
    }
    state.ResumeTiming();
    ga::evaluate_all(pop, ctx);
    benchmark::DoNotOptimize(pop.data());
  }
}
BENCHMARK(BM_evaluate_population)->Arg(1)->Arg(2)->Arg(4);

void BM_crossover_mutate(benchmark::State& state) {
  Fixture& f = fixture();
  Rng rng(5);
  const BitMask a = ga::generate_individual(f.arch.weight_count(), 0.5, rng);
  const BitMask b = ga::generate_individual(f.arch.weight_count(), 0.5, rng);
  ga::Individual parent;
  parent.mask = a;
  for (auto _ : state) {
    ga::Individual child;
    child.mask = ga::crossover(a, b, rng);
    benchmark::DoNotOptimize(ga::mutate(child, rng));
  }
}
BENCHMARK(BM_crossover_mutate);

}  // namespace

BENCHMARK_MAIN();
