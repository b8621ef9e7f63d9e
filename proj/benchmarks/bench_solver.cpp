#include <benchmark/benchmark.h>

#include <random>

#include "vep/relative_energy.hpp"
#include "vep/simulation.hpp"

namespace {

using namespace vep;

RunConfig scenario(int n, const char* name) {
    RunConfig c = default_config();
    c.grid = Grid::square(n, 8.0);
    c.initial.scenario = name;
    return c;
}

void BM_TimeStep(benchmark::State& st, const char* name) {
    const RunConfig c = scenario(int(st.range(0)), name);
    const State s = make_initial_data(c);
    const Forcing f = make_forcing(c.forcing);
    for (auto _ : st) benchmark::DoNotOptimize(picard_time_step(s, c.h, c.material, f, c.solver));
}
BENCHMARK_CAPTURE(BM_TimeStep, spinodal, "spinodal")->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_TimeStep, shear_yield, "shear-yield")->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_PlasticProx(benchmark::State& st) {
    const PlasticParams p{1.0, 1.0, 1e-3, 1e-3, 0.5, 0.3};
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<StfValue> z(4096);
    for (auto& v : z) v = {U(rng), U(rng), 0.0, 0.0, 0.0};
    std::size_t i = 0;
    for (auto _ : st) {
        benchmark::DoNotOptimize(plastic_prox(p, 0.3, z[i & 4095], 2, 0.25));
        ++i;
    }
}
BENCHMARK(BM_PlasticProx);

void BM_RelativeDissipation(benchmark::State& st) {
    RunConfig c = scenario(int(st.range(0)), "spinodal");
    const TestTriple tt = make_test_triple(c.verify.triple, c.grid, c.material.lambda, &c.material.plastic);
    const State s = make_initial_data(c);
    for (auto _ : st) {
        const TripleSlice ts = sample_triple(tt, c.grid, 0.5);
        benchmark::DoNotOptimize(relative_dissipation(s, ts, c.material.gamma, c.material, c.verify.weight));
    }
}
BENCHMARK(BM_RelativeDissipation)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
