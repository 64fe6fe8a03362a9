#include "startrace/equiv.hpp"
#include "startrace/gsdecomp.hpp"
#include "startrace/trace.hpp"

#include <benchmark/benchmark.h>

using namespace startrace;

namespace {

Poly monomial(PhaseSpace s, int a, int b) {
    return Poly::variable(s, s.q(0)).pow(a) * Poly::variable(s, s.p(s.n() - 1)).pow(b);
}

void BM_MoyalProduct(benchmark::State& state) {
    const PhaseSpace s(static_cast<int>(state.range(0)));
    const int order = static_cast<int>(state.range(1));
    const StarProduct star = StarProduct::moyal(s, order);
    const Poly u = monomial(s, 3, 2), v = monomial(s, 2, 3);
    for (auto _ : state) benchmark::DoNotOptimize(star.multiply(u, v));
}
BENCHMARK(BM_MoyalProduct)->Args({1, 4})->Args({1, 6})->Args({2, 6});

void BM_MoyalTraceResidual(benchmark::State& state) {
    const PhaseSpace s(static_cast<int>(state.range(0)));
    const int order = static_cast<int>(state.range(1));
    const StarProduct star = StarProduct::moyal(s, order);
    const TraceFunctional tau = TraceFunctional::moyal(s, order);
    const GaussFn e = GaussFn::standard(s);
    const GaussFn u = GaussFn::gaussian(monomial(s, 1, 1), Rational(1));
    for (auto _ : state) benchmark::DoNotOptimize(trace_residual(tau, star, u, e));
}
BENCHMARK(BM_MoyalTraceResidual)->Args({1, 4})->Args({1, 6})->Unit(benchmark::kMillisecond);

void BM_TransportedStar(benchmark::State& state) {
    const PhaseSpace s(1);
    const int order = static_cast<int>(state.range(0));
    const Equivalence t = random_equivalence(s, order, 1);
    const StarProduct moyal = StarProduct::moyal(s, order);
    for (auto _ : state) benchmark::DoNotOptimize(transport_star(t, moyal));
}
BENCHMARK(BM_TransportedStar)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_GsDecompose2d(benchmark::State& state) {
    const int points = static_cast<int>(state.range(0));
    const GridFn b = bump_generate({1.0, 1.0}, points, 5, 0.5);
    const GridFn u = b - bump_generate({1.0, 1.0}, points, 5, 0.7);
    for (auto _ : state) benchmark::DoNotOptimize(gs_decompose(u));
}
BENCHMARK(BM_GsDecompose2d)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
