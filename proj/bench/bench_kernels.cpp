/// @file bench_kernels.cpp
/// @brief Serial versus OpenMP timings of the hot loops.

#include "thermodelay/kernels.hpp"
#include "thermodelay/spectral.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace thermodelay;

namespace {

Generator make_generator(int n) {
    PhysParams p;
    p.beta = 4.0;
    return assemble_generator(Grid::make(n, n, p.ell), p);
}

Exec exec_of(const benchmark::State& state) { return state.range(1) ? Exec::parallel : Exec::serial; }

void BM_CsrApply(benchmark::State& state) {
    const Generator gen = make_generator(static_cast<int>(state.range(0)));
    std::vector<double> x(gen.dim()), y(gen.dim());
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = std::sin(0.1 * k);
    for (auto _ : state) {
        csr_apply(gen.matrix, x, y, exec_of(state));
        benchmark::DoNotOptimize(y.data());
    }
}

void BM_RayleighBatch(benchmark::State& state) {
    const Generator gen = make_generator(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(rayleigh_batch(gen, 4.0, 3.0, 256, 1, exec_of(state)));
}

void BM_ModalSpectrum(benchmark::State& state) {
    PhysParams p;
    p.beta = 4.0;
    const Grid g = Grid::make(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)), p.ell);
    for (auto _ : state) benchmark::DoNotOptimize(modal_spectrum(g, p, exec_of(state)));
}

void BM_SweepMap(benchmark::State& state) {
    const std::function<double(std::size_t)> point = [](std::size_t i) {
        PhysParams p;
        p.beta = 1.0 + static_cast<double>(i);
        return spectral_abscissa(assemble_generator(Grid::make(32, 32, p.ell), p)).value;
    };
    for (auto _ : state) benchmark::DoNotOptimize(map_indexed<double>(16, point, exec_of(state)));
}

}  // namespace

BENCHMARK(BM_CsrApply)->ArgsProduct({{64, 128}, {0, 1}});
BENCHMARK(BM_RayleighBatch)->ArgsProduct({{64, 128}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ModalSpectrum)->ArgsProduct({{64}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepMap)->ArgsProduct({{0}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
