#include <benchmark/benchmark.h>

#include "seqmodel/trainer.hpp"

using namespace seqmodel;

static void BM_SampleTrainingSet(benchmark::State& state) {
    const double f = static_cast<double>(state.range(0)) / 100.0;
    std::uint64_t seed = 1;
    for (auto _ : state) {
        TrainingSet t = sample_training_set(16, f, seed++);
        benchmark::DoNotOptimize(t.samples.data());
    }
}
BENCHMARK(BM_SampleTrainingSet)->Arg(5)->Arg(20);

static void BM_Train(benchmark::State& state) {
    const double f = static_cast<double>(state.range(0)) / 100.0;
    const TrainingSet t = sample_training_set(16, f, 7);
    for (auto _ : state) {
        TrainResult res = train(t, TruncationPolicy{});
        benchmark::DoNotOptimize(res.model.sites.data());
    }
    state.SetItemsProcessed(state.iterations() * t.count());
}
BENCHMARK(BM_Train)->Arg(5)->Arg(20)->Arg(100);

static void BM_EffectiveDensityStep(benchmark::State& state) {
    const TrainingSet t = sample_training_set(16, 0.2, 7);
    SummaryVectors v(t.count(), 2);
    for (int i = 0; i < t.count(); ++i) v.row(i)[t.samples[i].bit(0)] = 1.0;
    const SuffixGroups groups = group_by_suffix(t, 2);
    for (auto _ : state) {
        EffectiveDensity rho = effective_density(v, groups);
        benchmark::DoNotOptimize(rho.matrix.data.data());
    }
    state.SetItemsProcessed(state.iterations() * t.count());
}
BENCHMARK(BM_EffectiveDensityStep);

BENCHMARK_MAIN();
