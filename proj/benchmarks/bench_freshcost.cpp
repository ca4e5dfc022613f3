#include <benchmark/benchmark.h>

#include <random>

#include "freshcost/freshcost.hpp"

namespace {

using namespace freshcost;

void BM_MccMatrix(benchmark::State& state) {
    const auto a = default_assumptions();
    for (auto _ : state) benchmark::DoNotOptimize(mcc_matrix(a));
}
BENCHMARK(BM_MccMatrix);

void BM_EvaluateRecords(benchmark::State& state) {
    const auto a = default_assumptions();
    const auto labels = a.class_names();
    std::mt19937 rng(1);
    std::uniform_int_distribution<std::size_t> cls(0, 2);
    std::vector<PredictionRecord> records;
    for (int i = 0; i < state.range(0); ++i)
        records.push_back({std::to_string(i), labels[cls(rng)], labels[cls(rng)], std::nullopt, std::nullopt});
    for (auto _ : state) benchmark::DoNotOptimize(evaluate(records, a, "bench"));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EvaluateRecords)->Arg(452)->Arg(100000);

void BM_EstimateMccEmpirical(benchmark::State& state) {
    const auto a = default_assumptions();
    SimOptions options;
    options.threads = 1;
    for (auto _ : state)
        benchmark::DoNotOptimize(
            estimate_mcc_empirical(a, ClassId{2}, ClassId{1}, static_cast<std::uint64_t>(state.range(0)), 7, options));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EstimateMccEmpirical)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

void BM_SimulateDay(benchmark::State& state) {
    const auto a = default_assumptions();
    std::vector<SimItem> items;
    for (std::size_t i = 0; i < 452; ++i) items.push_back({ClassId{i % 3}, ClassId{(i / 3) % 3}});
    SimOptions options;
    options.threads = 1;
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(simulate_day(a, items, seed++, options));
}
BENCHMARK(BM_SimulateDay);

}  // namespace

BENCHMARK_MAIN();
