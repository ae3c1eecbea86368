// Serial reference vs OpenMP path for the data-parallel kernels.

#include "support.hpp"

#include "nlstiff/buckling.hpp"
#include "nlstiff/sweep.hpp"

#include <benchmark/benchmark.h>

#include <numbers>
#include <random>

using namespace nlstiff;

namespace {

Execution mode(const benchmark::State& state) {
    return state.range(0) == 0 ? Execution::serial : Execution::parallel;
}

void label(benchmark::State& state) {
    state.SetLabel(state.range(0) == 0 ? "serial" : "parallel x" + std::to_string(available_threads()));
}

void BM_ReducedEnergyGrid(benchmark::State& state) {
    const auto chain = ChainModel::uniform(4);
    const LoadFrame frame = make_load_frame(chain, Configuration::relaxed(nlstiff::testing::u_shape()));
    const int count = 256;
    Matrix candidates(count * count, 2);
    for (int i = 0; i < count; ++i) {
        for (int j = 0; j < count; ++j) {
            candidates(i * count + j, 0) = -std::numbers::pi + 2 * std::numbers::pi * i / count;
            candidates(i * count + j, 1) = -std::numbers::pi + 2 * std::numbers::pi * j / count;
        }
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(reduced_energy_grid(chain, frame.initial, candidates, frame.target(0.4),
                                                     ElbowBranch::positive, mode(state)));
    }
    state.SetItemsProcessed(state.iterations() * candidates.rows());
    label(state);
}
BENCHMARK(BM_ReducedEnergyGrid)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_SweepRestarts(benchmark::State& state) {
    SweepRequest request{ChainModel::uniform(4), Configuration::relaxed(nlstiff::testing::z_shape()), 0.6, 60};
    request.seeds = 16;
    request.execution = mode(state);
    for (auto _ : state) benchmark::DoNotOptimize(sweep_force_deflection(request));
    label(state);
}
BENCHMARK(BM_SweepRestarts)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_AnalyzeChains(benchmark::State& state) {
    std::mt19937_64 rng(5);
    std::vector<ChainModel> chains;
    for (int i = 0; i < 512; ++i) chains.push_back(nlstiff::testing::random_chain(rng, 2 + i % 9));
    for (auto _ : state) benchmark::DoNotOptimize(analyze_chains(chains, mode(state)));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(chains.size()));
    label(state);
}
BENCHMARK(BM_AnalyzeChains)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
