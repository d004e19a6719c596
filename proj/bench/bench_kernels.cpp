#include <benchmark/benchmark.h>

#include "clickbench/distill.hpp"
#include "clickbench/runner.hpp"
#include "clickbench/synthetic.hpp"

using namespace clickbench;

namespace {

std::vector<GeneratedTask> sample_pages(std::size_t n) {
  GenSpec spec;
  spec.seed = 1;
  spec.element_count = {8, 16};
  return generate_tasks(spec, n);
}

void bm_render_reference(benchmark::State& state) {
  const auto pages = sample_pages(8);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(render_page_reference(*pages[i++ % pages.size()].layout));
}

void bm_render_parallel(benchmark::State& state) {
  const auto pages = sample_pages(8);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(render_page(*pages[i++ % pages.size()].layout));
}

void run_oracle(benchmark::State& state, Execution execution) {
  std::vector<TaskSpec> tasks;
  for (const auto& g : sample_pages(40)) tasks.push_back(g.task);
  RunConfig config;
  config.step_quota = 3;
  config.repetitions = 2;
  BenchmarkOptions options;
  options.execution = execution;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        run_benchmark(synthetic_backend_factory(), [] { return make_oracle_agent(); }, tasks, config, options));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(tasks.size()) * config.repetitions);
}

void bm_benchmark_serial(benchmark::State& state) { run_oracle(state, Execution::Serial); }
void bm_benchmark_parallel(benchmark::State& state) { run_oracle(state, Execution::Parallel); }

void stage1(benchmark::State& state, Execution execution) {
  Stage1Spec spec;
  spec.gen.seed = 2;
  spec.click_fraction = 0.5;
  for (auto _ : state) benchmark::DoNotOptimize(gen_stage1_samples(spec, 16, 0, execution));
  state.SetItemsProcessed(state.iterations() * 16);
}

void bm_stage1_serial(benchmark::State& state) { stage1(state, Execution::Serial); }
void bm_stage1_parallel(benchmark::State& state) { stage1(state, Execution::Parallel); }

}  // namespace

BENCHMARK(bm_render_reference)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_render_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_benchmark_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_benchmark_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_stage1_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_stage1_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
