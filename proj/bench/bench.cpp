// Serial reference vs OpenMP execution of the per-sample kernels.
// Run with OMP_NUM_THREADS to vary the thread count.

#include <random>

#include <benchmark/benchmark.h>

#include "qnn/batch.hpp"
#include "qnn/layers.hpp"
#include "qnn/moduli.hpp"
#include "qnn/trace.hpp"

namespace {

using namespace qnn;

constexpr int kInputs = 16;
constexpr int kOutputs = 4;
constexpr std::size_t kSamples = 256;

struct Workload {
    NeuralNetwork net;
    Batch batch;
    Dataset data;
};

const Workload& workload() {
    static const Workload w = [] {
        const auto built = build_network({FullyConnected{kInputs, 48, true, "tanh"}, FullyConnected{48, 32, true, "tanh"}},
                                         kInputs, kOutputs);
        Workload out{built.network(randomize_free_weights(built.weights, built.architecture, 1)), {}, {}};
        std::mt19937_64 rng(2);
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        for (std::size_t i = 0; i < kSamples; ++i) {
            std::vector<double> x(kInputs), t(kOutputs);
            for (auto& v : x) v = u(rng);
            for (auto& v : t) v = u(rng);
            out.batch.emplace_back(x.begin(), x.end());
            out.data.inputs.push_back(std::move(x));
            out.data.targets.push_back(std::move(t));
        }
        return out;
    }();
    return w;
}

Execution mode(const benchmark::State& state) { return state.range(0) == 0 ? Execution::Serial : Execution::Parallel; }

void label(benchmark::State& state) {
    state.SetLabel(state.range(0) == 0 ? "serial" : "parallel");
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * kSamples));
}

void BM_ForwardBatch(benchmark::State& state) {
    const auto& w = workload();
    for (auto _ : state) benchmark::DoNotOptimize(forward_batch(w.net, w.batch, mode(state)));
    label(state);
}

void BM_DataRepresentationBatch(benchmark::State& state) {
    const auto& w = workload();
    for (auto _ : state) benchmark::DoNotOptimize(data_representation_batch(w.net, w.batch, mode(state)));
    label(state);
}

void BM_ModuliMapBatch(benchmark::State& state) {
    const auto& w = workload();
    for (auto _ : state) benchmark::DoNotOptimize(moduli_map_batch(w.net, w.batch, mode(state)));
    label(state);
}

void BM_PruningProfile(benchmark::State& state) {
    const auto& w = workload();
    for (auto _ : state) benchmark::DoNotOptimize(pruning_profile(w.net, w.batch, 1e-3, mode(state)));
    label(state);
}

void BM_BatchGradients(benchmark::State& state) {
    const auto& w = workload();
    for (auto _ : state) benchmark::DoNotOptimize(batch_gradients(w.net, w.data, {}, mode(state)));
    label(state);
}

} // namespace

BENCHMARK(BM_ForwardBatch)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_DataRepresentationBatch)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ModuliMapBatch)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_PruningProfile)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_BatchGradients)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
