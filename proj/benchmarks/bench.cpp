#include <benchmark/benchmark.h>

#include "slsreal/model.hpp"
#include "slsreal/pipeline.hpp"
#include "slsreal/presets.hpp"

using namespace sls;

namespace {

SlsModel preset_model(int N) {
    SlsModel model;
    model.states = presets::mimo3_states();
    model.switching = presets::mimo3_mixed_switching(N);
    return model;
}

void BM_GenerateMarkov(benchmark::State& state) {
    auto model = preset_model(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(generate_markov(model, 13));
}
BENCHMARK(BM_GenerateMarkov)->Arg(400)->Arg(1000);

void BM_RealizeAt(benchmark::State& state) {
    auto model = preset_model(400);
    auto seq = generate_markov(model, 13);
    for (auto _ : state) benchmark::DoNotOptimize(ltv::realize_at(seq, 3, 100));
}
BENCHMARK(BM_RealizeAt);

void BM_RealizeWindow(benchmark::State& state) {
    auto model = preset_model(static_cast<int>(state.range(0)));
    auto seq = generate_markov(model, 13);
    for (auto _ : state) benchmark::DoNotOptimize(ltv::realize_range(seq, 3));
}
BENCHMARK(BM_RealizeWindow)->Arg(400)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_MetaRun(benchmark::State& state) {
    auto model = preset_model(static_cast<int>(state.range(0)));
    auto seq = generate_markov(model, 13);
    RunConfig rc;
    rc.n = 3;
    for (auto _ : state) benchmark::DoNotOptimize(pipeline::meta_run(seq, rc));
}
BENCHMARK(BM_MetaRun)->Arg(400)->Arg(600)->Unit(benchmark::kMillisecond);

}  // namespace
