#include <benchmark/benchmark.h>

#include <kgds/special_functions.hpp>

namespace {

void BM_Hyp2F1(benchmark::State& state) {
    double z = state.range(0) / 100.0;
    kgds::Hyp2F1Params p{kgds::Complex(0.2, -0.4), kgds::Complex(0.2, -0.4), 1.0, z};
    for (auto _ : state) benchmark::DoNotOptimize(kgds::gauss_2f1(p));
}
BENCHMARK(BM_Hyp2F1)->Arg(10)->Arg(45)->Arg(55)->Arg(90)->Arg(99);

void BM_Hyp2F1LogCase(benchmark::State& state) {
    kgds::Hyp2F1Params p{-0.5, 0.5, 1.0, 0.9};
    for (auto _ : state) benchmark::DoNotOptimize(kgds::gauss_2f1(p));
}
BENCHMARK(BM_Hyp2F1LogCase);

}  // namespace
