#include <benchmark/benchmark.h>

#include "flash/designs.hpp"
#include "flash/engine.hpp"
#include "flash/fifo.hpp"
#include "flash/naive.hpp"
#include "flash/oracle.hpp"
#include "flash/parser.hpp"
#include "flash/trace.hpp"

namespace {

void BM_EngineToy(benchmark::State& state) {
  const auto e = flash::prepare(flash::gen_toy_mpath({.trip = state.range(0)}), {.bubbles = true});
  std::uint64_t module_cycles = 0;
  for (auto _ : state) {
    flash::SimState s(e, flash::EngineOptions{false});
    benchmark::DoNotOptimize(s.run(100'000'000));
    module_cycles += s.module_cycles();
  }
  state.counters["module_cycles/s"] =
      benchmark::Counter(static_cast<double>(module_cycles), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_EngineToy)->Arg(10'000)->Arg(100'000)->Unit(benchmark::kMillisecond);

void BM_EngineToyTraced(benchmark::State& state) {
  const auto e = flash::prepare(flash::gen_toy_mpath({.trip = state.range(0)}), {.bubbles = true});
  for (auto _ : state) {
    flash::SimState s(e);
    s.run(100'000'000);
    benchmark::DoNotOptimize(s.trace().size());
  }
}
BENCHMARK(BM_EngineToyTraced)->Arg(10'000)->Unit(benchmark::kMillisecond);

void BM_Oracle(benchmark::State& state) {
  const auto e = flash::prepare(flash::gen_toy_mpath({.trip = state.range(0)}), {.bubbles = true});
  for (auto _ : state) benchmark::DoNotOptimize(flash::run_oracle(e, 100'000'000).trace.size());
}
BENCHMARK(BM_Oracle)->Arg(10'000)->Unit(benchmark::kMillisecond);

void BM_Naive(benchmark::State& state) {
  const auto e = flash::elaborate(flash::gen_toy_mpath({.trip = state.range(0)}));
  for (auto _ : state) benchmark::DoNotOptimize(flash::run_sequential(e).outputs.size());
}
BENCHMARK(BM_Naive)->Arg(10'000)->Unit(benchmark::kMillisecond);

void BM_Stencil(benchmark::State& state) {
  const auto e = flash::elaborate(flash::gen_stencil({.width = state.range(0)}));
  for (auto _ : state) benchmark::DoNotOptimize(flash::simulate(e, 100'000'000).total_cycles);
}
BENCHMARK(BM_Stencil)->Arg(10'000)->Unit(benchmark::kMillisecond);

void BM_FifoWriteReadCommit(benchmark::State& state) {
  flash::FifoState f(state.range(0));
  flash::Value v = 0;
  for (auto _ : state) {
    f.write(v++);
    f.commit();
    benchmark::DoNotOptimize(f.read());
    f.commit();
  }
}
BENCHMARK(BM_FifoWriteReadCommit)->Arg(1)->Arg(4);

void BM_ParseFormat(benchmark::State& state) {
  const std::string text = flash::format_design(flash::gen_matmul({.n = 8}));
  for (auto _ : state) benchmark::DoNotOptimize(flash::format_design(flash::parse_design(text)));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ParseFormat);

void BM_TraceCsv(benchmark::State& state) {
  std::vector<flash::TraceEvent> trace;
  flash::simulate(flash::prepare(flash::gen_toy_mpath({.trip = 2000}), {.bubbles = true}),
                  100'000'000, &trace);
  for (auto _ : state) benchmark::DoNotOptimize(flash::trace_csv(trace).size());
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * trace.size()));
}
BENCHMARK(BM_TraceCsv)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
