#pragma once

#include "subeq/solver.hpp"

namespace subeq {

/// Structured output of the S^3 x S^3 tube counterexample run.
struct AppendixDReport {
    double c = 0.0;
    int delta_nodes = 0;

    // (i) eigenvalue signature of Hess u1 at sampled interior points
    int signature_samples = 0;
    int signature_hits = 0;  // samples with exactly (2 negative, 3 zero, 1 positive)
    double zero_band = 1e-6;

    // (ii) zero maximum principle for u1 + u2 + c
    ZmpReport zmp;

    // (iii) P3-harmonicity residuals (ordered-eigenvalue index 4 of 6)
    double lambda4_residual_u1 = 0.0;
    double lambda4_residual_v = 0.0;  // v = -c - u2

    // (iv) the uniqueness pair u1 and v = -c - u2
    double boundary_agreement_max = 0.0;  // max |u1 - v| on rho = c
    double interior_gap_at_band = 0.0;    // u1 - v at delta1 = delta2 = band floor

    double wall_seconds = 0.0;
};

struct AppendixDOptions {
    int delta_nodes = 41;        // nodes per delta axis of the 6-D grid
    int angular_nodes = 3;       // nodes per angular axis (functions are angular-invariant)
    int signature_samples = 100;
    double zero_band = 1e-6;
    std::uint64_t seed = 0xD00Dull;
};

/// Requires 0 < c < pi^2/8. Throws InvalidArgument when the resolution is too
/// coarse to give the band domain any interior nodes.
AppendixDReport appendix_d_harness(double c, const AppendixDOptions& opts = {});

/// Grid, masks and the (region, shell) pair used by the harness; exposed for
/// the sums-probe command which reuses the same geometry at coarser budgets.
struct AppendixDGrid {
    Grid grid;
    std::vector<long> region;  // interior nodes of {rho < c}
    std::vector<long> shell;   // boundary nodes with rho >= c
};

AppendixDGrid appendix_d_grid(double c, int delta_nodes, int angular_nodes);

}  // namespace subeq
