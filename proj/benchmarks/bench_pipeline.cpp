#include <benchmark/benchmark.h>

#include "fbsurf/laplacian.hpp"
#include "fbsurf/random.hpp"
#include "fbsurf/spectral.hpp"
#include "fbsurf/synthesis.hpp"

using namespace fbsurf;

static void BM_AssembleSphere(benchmark::State& state) {
    const Mesh mesh = generate_sphere(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(assemble(mesh, WeightScheme::Cotangent, BoundaryCondition::Closed));
    }
    state.counters["vertices"] = static_cast<double>(mesh.num_vertices());
}
BENCHMARK(BM_AssembleSphere)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_EigenpairsSphere(benchmark::State& state) {
    const auto sys = assemble(generate_sphere(3), WeightScheme::InverseSquareDistance, BoundaryCondition::Closed);
    for (auto _ : state) {
        benchmark::DoNotOptimize(smallest_eigenpairs(sys, state.range(0), 1e-10));
    }
}
BENCHMARK(BM_EigenpairsSphere)->Arg(9)->Arg(50)->Unit(benchmark::kMillisecond);

static void BM_EigenpairsDisk(benchmark::State& state) {
    const auto sys = assemble(generate_disk(12), WeightScheme::InverseSquareDistance, BoundaryCondition::Dirichlet);
    for (auto _ : state) benchmark::DoNotOptimize(smallest_eigenpairs(sys, 50, 1e-10));
}
BENCHMARK(BM_EigenpairsDisk)->Unit(benchmark::kMillisecond);

static void BM_RieszSynthesis(benchmark::State& state) {
    const auto sys = assemble(generate_sphere(3), WeightScheme::InverseSquareDistance, BoundaryCondition::Closed);
    const SpectralData spectra = smallest_eigenpairs(sys, 101, 1e-10);
    SynthesisConfig cfg;
    cfg.alpha = 0.5;
    cfg.n_terms = 100;
    cfg.origin = 0;
    cfg.threads = static_cast<unsigned>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) {
        cfg.seed = seed++;
        benchmark::DoNotOptimize(synthesize_riesz_field(spectra, cfg));
    }
}
BENCHMARK(BM_RieszSynthesis)->Arg(1)->Arg(4)->Unit(benchmark::kMicrosecond);

static void BM_Path1d(benchmark::State& state) {
    const Mesh grid = generate_interval(1001);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(synthesize_path_1d(BoundaryCondition::Dirichlet, 0.5, state.range(0), grid, seed++));
    }
}
BENCHMARK(BM_Path1d)->Arg(100)->Arg(1000)->Unit(benchmark::kMicrosecond);

static void BM_GaussianDraws(benchmark::State& state) {
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(gaussian_draws(seed++, static_cast<std::size_t>(state.range(0))));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GaussianDraws)->Arg(1 << 10)->Arg(1 << 16);
BENCHMARK_MAIN();
