#include <doctest.h>

#include <cmath>

#include "subeq/catalog.hpp"
#include "subeq/harness.hpp"

using namespace subeq;

TEST_CASE("appendix d harness at c = 0.5") {
    AppendixDOptions opts;
    opts.delta_nodes = 41;  // h about 2e-2 on the delta axes
    AppendixDReport rep = appendix_d_harness(0.5, opts);

    CHECK(rep.signature_hits == rep.signature_samples);
    CHECK(rep.zmp.applicable);
    CHECK(rep.zmp.violation);
    CHECK(std::abs(rep.zmp.magnitude - 0.5) <= 2e-2);
    CHECK(rep.lambda4_residual_u1 <= 1e-6);
    CHECK(rep.lambda4_residual_v <= 1e-6);
    CHECK(rep.boundary_agreement_max <= 1e-15);
    CHECK(rep.interior_gap_at_band >= 0.5 - 1e-3);
    CHECK(rep.interior_gap_at_band <= 0.5);
}

TEST_CASE("appendix d harness rejects bad inputs") {
    CHECK_THROWS_AS(appendix_d_harness(-0.1), InvalidArgument);
    CHECK_THROWS_AS(appendix_d_harness(2.0), InvalidArgument);
    AppendixDOptions coarse;
    coarse.delta_nodes = 2;
    CHECK_THROWS_AS(appendix_d_harness(0.5, coarse), InvalidArgument);
}

TEST_CASE("appendix d sums probe: maxima drift to the band corner") {
    const double c = 0.5;
    AppendixDGrid gg = appendix_d_grid(c, 13, 3);
    AppendixDFields fields = appendix_d_fields();
    auto u1 = fields.u1;
    auto u2 = fields.u2;
    GridFunction u = GridFunction::from(gg.grid, u1);
    GridFunction v = GridFunction::from(
        gg.grid, [&](const Eigen::VectorXd& x) { return u2(x) + c; });
    auto rep = sums_probe(u, v, gg.region, gg.shell, {1.0, 0.5, 0.25, 0.125, 0.0625});
    CHECK(rep.applicable);
    CHECK(rep.m0 > 0.0);
    CHECK(rep.monotone);
    CHECK(rep.penalty_vanishes);
    // the argmax pair approaches the argmax of u + v (smallest rho available)
    const auto& last = rep.steps.back();
    CHECK((last.x - last.y).norm() <= 1e-12);
    auto rho = fields.rho;
    double best_rho = std::numeric_limits<double>::infinity();
    for (long nidx : gg.region) best_rho = std::min(best_rho, rho(gg.grid.coords(nidx)));
    CHECK(rho(last.x) <= best_rho + 1e-9);
}

TEST_CASE("comparison fails on the tube domain for the shifted-branch pair") {
    // u1 is branch-3 subharmonic, u2 + c is dual (branch-4) subharmonic, and
    // the zero maximum principle still breaks: comparison fails on Omega_c.
    const double c = 0.5;
    AppendixDGrid gg = appendix_d_grid(c, 21, 3);
    AppendixDFields fields = appendix_d_fields();
    auto u1f = fields.u1;
    auto u2f = fields.u2;
    GridFunction u = GridFunction::from(gg.grid, u1f);
    GridFunction v = GridFunction::from(
        gg.grid, [&](const Eigen::VectorXd& x) { return u2f(x) + c; });
    Subequation p3 = make_pq(6, 3);
    auto su = f_subharmonic_test(u, p3, fields.metric, 1e-6);
    auto sv = f_subharmonic_test(v, dual(p3), fields.metric, 1e-6);
    CHECK(su.pass);
    CHECK(sv.pass);
    GridFunction w = u;
    w.values += v.values;
    auto z = zmp_check(w, gg.region, gg.shell);
    CHECK(z.applicable);
    CHECK(z.violation);
    CHECK(z.magnitude > 0.4);
}

TEST_CASE("debug monotonicity assertion accepts a catalog solve") {
    Box b;
    b.lo = Eigen::Vector2d(0, 0);
    b.hi = Eigen::Vector2d(1, 1);
    DomainSpec all;
    all.rho = [](const Eigen::VectorXd&) { return -1.0; };
    Grid g = Grid::make(b, {9, 9}, all);
    MetricChart eu = builtin_metric("euclidean:n=2");
    GridFunction phi = GridFunction::from(
        g, [](const Eigen::VectorXd& x) { return x[0] - 0.5 * x[1]; });
    SolveConfig cfg;
    cfg.debug_check_monotone = true;
    auto [uu, rep] = perron_solve(make_pq(2, 1), eu, g, phi, cfg);
    CHECK(rep.converged);
}
