#include <benchmark/benchmark.h>

#include "subeq/solver.hpp"
#include "subeq/catalog.hpp"

using namespace subeq;

namespace {

Grid unit_square_grid(int nodes) {
    Box b;
    b.lo = Eigen::Vector2d(0, 0);
    b.hi = Eigen::Vector2d(1, 1);
    DomainSpec all;
    all.rho = [](const Eigen::VectorXd&) { return -1.0; };
    return Grid::make(b, {nodes, nodes}, all);
}

}  // namespace

static void PerronSweepLaplace(benchmark::State& state) {
    const int nodes = int(state.range(0));
    Grid g = unit_square_grid(nodes);
    MetricChart eu = builtin_metric("euclidean:n=2");
    GridFunction phi = GridFunction::from(
        g, [](const Eigen::VectorXd& x) { return x[0] * x[0] - x[1] * x[1]; });
    SolveConfig cfg;
    cfg.max_sweeps = 1;  // cost of a single sweep
    cfg.tol_iter = 0.0;
    for (auto _ : state) {
        auto [u, rep] = perron_solve(make_laplace(2), eu, g, phi, cfg);
        benchmark::DoNotOptimize(u.values.sum());
    }
    state.SetItemsProcessed(state.iterations() * long(g.interior.size()));
}
BENCHMARK(PerronSweepLaplace)->Arg(17)->Arg(33)->Arg(65);

static void DiscreteJetTube(benchmark::State& state) {
    AppendixDFields fields = appendix_d_fields();
    Eigen::VectorXd c(6);
    c << 0.52, 0.1, 0.1, 0.83, 0.1, 0.1;
    Box b;
    b.lo = c.array() - 2e-2;
    b.hi = c.array() + 2e-2;
    DomainSpec all;
    all.rho = [](const Eigen::VectorXd&) { return -1.0; };
    Grid g = Grid::make(b, {5, 5, 5, 5, 5, 5}, all);
    auto u1 = fields.u1;
    GridFunction u = GridFunction::from(g, u1);
    const long center = g.flat({2, 2, 2, 2, 2, 2});
    for (auto _ : state) {
        benchmark::DoNotOptimize(discrete_jet(u, fields.metric, center));
    }
}
BENCHMARK(DiscreteJetTube);
