#include <benchmark/benchmark.h>

#include "subeq/catalog.hpp"

using namespace subeq;

static void OrderedEigenvalues(benchmark::State& state) {
    const int n = int(state.range(0));
    Rng rng(1);
    SymMat a(gauss_symmetric(rng, n), 1e300);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ordered_eigenvalues(a));
    }
}
BENCHMARK(OrderedEigenvalues)->Arg(2)->Arg(3)->Arg(6)->Arg(12);

static void GardingRootsSigma3(benchmark::State& state) {
    const int n = int(state.range(0));
    Rng rng(2);
    SymMat a(gauss_symmetric(rng, n), 1e300);
    for (auto _ : state) {
        benchmark::DoNotOptimize(garding_roots_sigma_k(a, 3));
    }
}
BENCHMARK(GardingRootsSigma3)->Arg(4)->Arg(8);

static void SpecialLagrangianMargin(benchmark::State& state) {
    const int n = int(state.range(0));
    Rng rng(3);
    Subequation f = make_special_lagrangian(n, 0.5);
    Jet2 j = random_jet(rng, n);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (auto _ : state) {
        benchmark::DoNotOptimize(f.margin(x, j));
    }
}
BENCHMARK(SpecialLagrangianMargin)->Arg(2)->Arg(4)->Arg(8);

static void LagrangianMinimum(benchmark::State& state) {
    Rng rng(4);
    SymMat a(gauss_symmetric(rng, 4), 1e300);
    PlaneSearchBudget b;
    b.samples = int(state.range(0));
    b.starts = 8;
    for (auto _ : state) {
        benchmark::DoNotOptimize(min_trace_over_lagrangian(a, b));
    }
}
BENCHMARK(LagrangianMinimum)->Arg(500)->Arg(2000);
