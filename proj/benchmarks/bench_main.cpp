#include <benchmark/benchmark.h>

#include "erasim/rb.hpp"
#include "erasim/tomography.hpp"

namespace {

using namespace erasim;

void BM_Displacement30(benchmark::State& state) {
    const FockSpace space(30);
    for (auto _ : state) {
        benchmark::DoNotOptimize(displacement(Complex(0.7, 0.4), space));
    }
}
BENCHMARK(BM_Displacement30);

void BM_CycleChannel(benchmark::State& state) {
    ErasureQubitConfig cfg;
    cfg.dim = static_cast<int>(state.range(0));
    const CycleChannel cycle(cfg);
    DensityMatrix rho = DensityMatrix::pure(Ket::fock(FockSpace(cfg.dim), 2));
    for (auto _ : state) {
        auto out = cycle(rho);
        benchmark::DoNotOptimize(out.survival);
    }
}
BENCHMARK(BM_CycleChannel)->Arg(3)->Arg(4);

void BM_LindbladEvolve(benchmark::State& state) {
    const FockSpace space(4);
    LindbladSpec spec;
    spec.collapse_operators = thermal_loss_collapse_ops(466e-6, 0.0072, space);
    const DensityMatrix rho = DensityMatrix::pure(Ket::fock(space, 2));
    for (auto _ : state) {
        benchmark::DoNotOptimize(lindblad_evolve(rho, spec, 11.9e-6, 0.5e-6));
    }
}
BENCHMARK(BM_LindbladEvolve);

void BM_MleState(benchmark::State& state) {
    Vec v(2);
    v << 1.0, 1.0;
    const DensityMatrix target = DensityMatrix::pure(Ket(v));
    std::vector<Complex> alphas;
    for (Complex a : five_point_alphas()) alphas.push_back(a);
    const auto samples = synthesize_wigner_samples(target, alphas, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(mle_state(samples, 2));
    }
}
BENCHMARK(BM_MleState);

void BM_RbShot(benchmark::State& state) {
    ErasureQubitConfig cfg;
    cfg.dim = 3;
    GateNoiseModel noise;
    noise.p_erasure_per_gate = 4.5e-2;
    noise.residual = depolarizing_residual(2.86e-3);
    std::uint64_t seed = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_rb(cfg, noise, {20}, 100, seed++));
    }
}
BENCHMARK(BM_RbShot);

}  // namespace

BENCHMARK_MAIN();
