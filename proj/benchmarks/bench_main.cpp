#include <benchmark/benchmark.h>

#include "hynoma/evaluation.hpp"
#include "hynoma/optimizer.hpp"
#include "hynoma/scenario.hpp"

namespace {

hynoma::Scenario default_scenario(std::uint64_t seed) {
    hynoma::GenConfig cfg;
    cfg.rng_seed = seed;
    return hynoma::generate_scenario(cfg);
}

void BM_GenerateScenario(benchmark::State& state) {
    hynoma::GenConfig cfg;
    std::uint64_t seed = 1;
    for (auto _ : state) {
        cfg.rng_seed = seed++;
        benchmark::DoNotOptimize(hynoma::generate_scenario(cfg));
    }
}
BENCHMARK(BM_GenerateScenario);

void BM_BuildSubproblem(benchmark::State& state) {
    const auto s = default_scenario(7);
    hynoma::SolveParams p;
    const auto st = hynoma::init_point(s, p);
    for (auto _ : state) {
        benchmark::DoNotOptimize(hynoma::build_subproblem(s, st, p));
    }
}
BENCHMARK(BM_BuildSubproblem);

void BM_SolveSubproblem(benchmark::State& state) {
    const auto s = default_scenario(7);
    hynoma::SolveParams p;
    const auto st = hynoma::init_point(s, p);
    auto [prog, vm] = hynoma::build_subproblem(s, st, p);
    for (auto _ : state) {
        benchmark::DoNotOptimize(hynoma::solve(prog, p.solver));
    }
}
BENCHMARK(BM_SolveSubproblem);

void BM_Algorithm1(benchmark::State& state) {
    const auto s = default_scenario(7);
    hynoma::SolveParams p;
    for (auto _ : state) {
        benchmark::DoNotOptimize(hynoma::algorithm1(s, p));
    }
}
BENCHMARK(BM_Algorithm1);

void BM_PfMonteCarlo(benchmark::State& state) {
    const auto s = default_scenario(7);
    hynoma::SolveParams p;
    const auto d = hynoma::solve_oma(s, hynoma::OmaKind::Poly, p);
    hynoma::EvalConfig cfg;
    cfg.samples = static_cast<int>(state.range(0));
    cfg.threads = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(hynoma::pf_montecarlo(d, s, cfg));
    }
}
BENCHMARK(BM_PfMonteCarlo)->Arg(1000);

} // namespace

BENCHMARK_MAIN();
