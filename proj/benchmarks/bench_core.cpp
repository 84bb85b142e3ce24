#include <benchmark/benchmark.h>

#include <vector>

#include "passim/beamforming.hpp"
#include "passim/channel.hpp"
#include "passim/cmt.hpp"
#include "passim/metaheuristics.hpp"

namespace {

using namespace passim;

ScenarioConfig bench_scenario(int n1, int n2) {
    auto sc = default_scenario();
    sc.pa_count = n1 + n2;
    sc.group_sizes = {n1, n2};
    sc.users.along_axis = {5.0, 13.0};
    sc.users.lateral = {4.0, 7.0};
    return sc;
}

std::vector<double> ladder(int count) {
    std::vector<double> x(count);
    const double step = count > 1 ? 16.0 / (count - 1) : 0.0;
    for (int n = 0; n < count; ++n) x[n] = 2.0 + step * n;
    return x;
}

void BM_EffectiveChannel(benchmark::State& state) {
    const int half = static_cast<int>(state.range(0)) / 2;
    const auto sc = bench_scenario(half, half);
    const auto x = ladder(sc.pa_count);
    for (auto _ : state) {
        benchmark::DoNotOptimize(effective_channel(sc, x));
    }
}
BENCHMARK(BM_EffectiveChannel)->Arg(4)->Arg(12)->Arg(24);

void BM_ZfPrecoder(benchmark::State& state) {
    const auto sc = bench_scenario(6, 6);
    const auto cs = effective_channel(sc, ladder(12));
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            zf_precoder(cs.H_eff, sc.power.max_power));
    }
}
BENCHMARK(BM_ZfPrecoder);

void BM_ZfFitness(benchmark::State& state) {
    const auto sc = bench_scenario(6, 6);
    const auto x = ladder(12);
    for (auto _ : state) {
        benchmark::DoNotOptimize(zf_fitness(x, sc));
    }
}
BENCHMARK(BM_ZfFitness);

void BM_PsoIteration(benchmark::State& state) {
    const auto sc = bench_scenario(6, 6);
    PSOParams p;
    p.particle_count = 100;
    p.iterations = 1;
    p.seed = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(pso_zf(sc, p));
    }
}
BENCHMARK(BM_PsoIteration);

void BM_CmeIntegrate(benchmark::State& state) {
    CMTModeInput m;
    m.propagation_constant = 999.7;
    m.coupling_strength = {130.0, 0.0};
    m.initial_amplitude = {1.0, 0.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            cme_integrate({m}, 999.7, 6e-3, static_cast<int>(state.range(0)),
                          false));
    }
}
BENCHMARK(BM_CmeIntegrate)->Arg(256)->Arg(4096);

}  // namespace

BENCHMARK_MAIN();
