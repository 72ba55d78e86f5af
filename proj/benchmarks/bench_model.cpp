#include <benchmark/benchmark.h>

#include "seqmodel/theory.hpp"
#include "seqmodel/trainer.hpp"

using namespace seqmodel;

static void BM_SamplerDraw(benchmark::State& state) {
    const TrainingSet t = sample_training_set(16, 1.0, 3);
    const TrainResult res = train(t, TruncationPolicy{});
    MpsSampler sampler(res.model);
    CounterRng rng(42);
    for (auto _ : state) {
        Bitstring s = sampler.draw(rng);
        benchmark::DoNotOptimize(s.bits);
    }
}
BENCHMARK(BM_SamplerDraw);

static void BM_Overlap(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const TrainingSet t = sample_training_set(n, 0.2, 3);
    const TrainResult res = train(t, TruncationPolicy{});
    const Mps target = parity_target_mps(n);
    for (auto _ : state) {
        double ov = overlap(res.model, target);
        benchmark::DoNotOptimize(ov);
    }
}
BENCHMARK(BM_Overlap)->Arg(8)->Arg(16);

static void BM_PredictCurve(benchmark::State& state) {
    std::vector<double> grid;
    for (int i = 1; i <= 20; ++i) grid.push_back(0.01 * i);
    for (auto _ : state) {
        auto points = predict_curve(16, grid);
        benchmark::DoNotOptimize(points.data());
    }
    state.SetItemsProcessed(state.iterations() * grid.size());
}
BENCHMARK(BM_PredictCurve);

static void BM_ExactReplay(benchmark::State& state) {
    const TrainingSet t = sample_training_set(16, 0.2, 3);
    for (auto _ : state) {
        ExactReplay replay = exact_replay(t);
        benchmark::DoNotOptimize(replay.angles.theta.data());
    }
}
BENCHMARK(BM_ExactReplay);

BENCHMARK_MAIN();
