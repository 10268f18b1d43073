#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include <kgds/transform.hpp>
#include <kgds/verify.hpp>

namespace {

using namespace kgds;

void BM_LagWeights(benchmark::State& state) {
    CurvedMass M = CurvedMass::from_value(0.3, 1.0);
    StaticTimeLayout layout = StaticTimeLayout::build(QuadratureRule::GaussLegendre, 32);
    for (auto _ : state) benchmark::DoNotOptimize(compute_lag_weights(1.7, layout, M, 1.0, 16, true));
}
BENCHMARK(BM_LagWeights)->Unit(benchmark::kMicrosecond);

void BM_LeapfrogStep(benchmark::State& state) {
    PhysicalParams p = PhysicalParams::natural(1.0, 0.05, 0.0);
    RadialGrid g = RadialGrid::uniform(0.6, 5.4, static_cast<int>(state.range(0)));
    std::vector<double> v0(g.n), v1(g.n, 0.0);
    for (int i = 0; i < g.n; ++i) v0[i] = std::exp(-4.0 * (g.r(i) - 3.0) * (g.r(i) - 3.0));
    LeapfrogStepper st(g, p, static_time_step(g, p, 0.5));
    st.start(v0, v1);
    for (auto _ : state) st.step();
}
BENCHMARK(BM_LeapfrogStep)->Arg(241)->Arg(961);

void BM_ApplyG(benchmark::State& state) {
    PhysicalParams p = PhysicalParams::natural(1.0, 0.05, 2.1875);
    TransformConfig cfg = TransformConfig::from_params(p);
    RadialGrid g = RadialGrid::uniform(0.6, 5.4, 97);
    std::vector<double> ts{1.0, 2.0};
    auto src = [&](double b) { return RadialField{g, std::vector<double>(g.n, std::cos(b)), b}; };
    for (auto _ : state) benchmark::DoNotOptimize(apply_G(src, g, ts, cfg));
}
BENCHMARK(BM_ApplyG)->Unit(benchmark::kMillisecond);

void BM_VerifyPoint(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(verify_derivative_decay({0.25, 0.0}, 1.0));
}
BENCHMARK(BM_VerifyPoint)->Unit(benchmark::kMillisecond);

}  // namespace
