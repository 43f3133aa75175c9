#pragma once

#include "subeq/grid.hpp"

namespace subeq {

enum class SweepMode { GaussSeidel, Jacobi };

struct SolveConfig {
    double tol_iter = 1e-10;      // max nodal update per sweep
    double tol_residual = 1e-8;   // max interior |margin| at the fixed point
    long max_sweeps = 100000;
    SweepMode mode = SweepMode::GaussSeidel;
    double value_cap = 1e8;
    double bracket_growth = 2.0;
    int threads = 1;              // Jacobi mode only
    // Debug assertion: sample 8 center values per nodal solve and require the
    // margin to be nonincreasing (throws InternalDefect on violation).
    bool debug_check_monotone = false;
};

struct SolveReport {
    bool converged = false;
    long sweeps = 0;
    double max_update = 0.0;
    double max_margin_residual = 0.0;
    long witness_node = -1;
    Eigen::VectorXd witness_coords;
    double wall_seconds = 0.0;
};

/// Framed riemannian 2-jet of u at an interior node: centered first
/// differences, centered second differences with the symmetric 4-point cross
/// stencil (exact on quadratics), then the riemannian hessian and the
/// g-orthonormal frame.
Jet2 discrete_jet(const GridFunction& u, const MetricChart& metric, long node);

struct SubharmonicReport {
    double min_margin = 0.0;
    long witness_node = -1;
    Eigen::VectorXd witness_coords;
    bool pass = false;
};

SubharmonicReport f_subharmonic_test(const GridFunction& u, const Subequation& f,
                                     const MetricChart& metric, double tol);

/// Perron-style nonlinear Gauss-Seidel sweep: at each interior node, with
/// neighbors frozen, take the largest center value whose margin is >= 0
/// (bracketed root of the nonincreasing nodal margin). Boundary nodes carry
/// phi exactly. Throws FlatUpdateError when margins ignore the center value.
std::pair<GridFunction, SolveReport> perron_solve(
    const Subequation& f, const MetricChart& metric, const Grid& grid,
    const GridFunction& phi, const SolveConfig& cfg = {},
    const GridFunction* initial = nullptr);

struct ZmpReport {
    bool applicable = false;   // boundary max <= 0
    double boundary_max = 0.0;
    double interior_max = 0.0;
    bool violation = false;    // interior max > 1e-9
    double magnitude = 0.0;
    long witness_node = -1;
    Eigen::VectorXd witness_coords;
};

ZmpReport zmp_check(const GridFunction& w, const std::vector<long>& region,
                    const std::vector<long>& boundary);
/// Region/boundary from the grid's own masks.
ZmpReport zmp_check(const GridFunction& w);

struct ComparisonReport {
    SubharmonicReport u_subharmonic;
    SubharmonicReport v_dual_subharmonic;
    ZmpReport zmp;
    bool comparison_holds = false;
};

ComparisonReport comparison_check(const GridFunction& u, const GridFunction& v,
                                  const Subequation& f, const MetricChart& metric,
                                  double tol);

struct SumsProbeStep {
    double epsilon = 0.0;
    double m_eps = 0.0;           // max of u(x)+v(y)-|x-y|^2/(2 eps)
    Eigen::VectorXd x, y;
    Eigen::VectorXd p_eps;        // (x-y)/eps
    double penalty = 0.0;         // |x-y|^2/eps
};

struct SumsProbeReport {
    bool applicable = false;      // ZMP actually violated (M0 > 0)
    double m0 = 0.0;
    std::vector<SumsProbeStep> steps;
    bool monotone = false;        // M_eps nonincreasing along the ladder
    bool penalty_vanishes = false;
};

/// Exhaustive maximization of u(x) + v(y) - |x-y|^2/(2 eps) over node pairs
/// of the region mask. Pair counts above 1e8 are rejected.
SumsProbeReport sums_probe(const GridFunction& u, const GridFunction& v,
                           const std::vector<long>& region,
                           const std::vector<long>& boundary,
                           const std::vector<double>& epsilons);

}  // namespace subeq
