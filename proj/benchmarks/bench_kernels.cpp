#include <benchmark/benchmark.h>

#include <kgds/kernels.hpp>

namespace {

const kgds::CurvedMass kMass = kgds::CurvedMass::from_value({0.3, 0.4}, 1.0);

void BM_KernelE(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(kgds::eval_E(0.2, 2.0, 0.5, kMass, 1.0));
}
BENCHMARK(BM_KernelE);

void BM_KernelK0Direct(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(kgds::eval_K0_direct(0.4, 2.0, kMass, 1.0));
}
BENCHMARK(BM_KernelK0Direct);

void BM_KernelDtE(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(kgds::eval_dtE(0.2, 2.0, 0.5, kMass, 1.0));
}
BENCHMARK(BM_KernelDtE);

}  // namespace
