#pragma once

#include <optional>

#include "subeq/subequation.hpp"

namespace subeq {

struct Box {
    Eigen::VectorXd lo, hi;
    int dim() const { return int(lo.size()); }
    bool contains(const Eigen::VectorXd& x, double slack = 0.0) const;
};

/// Christoffel symbols Gamma^k_ij at a point, applied as the linear map
/// p -> Gamma(p) in Sym(n) with (Gamma(p))_ij = sum_k Gamma^k_ij p_k.
struct ChristoffelMap {
    std::vector<Eigen::MatrixXd> gamma;  // gamma[k](i, j) = Gamma^k_ij

    int dim() const { return int(gamma.size()); }
    SymMat apply(const Eigen::VectorXd& p) const;
};

struct MetricChart {
    std::string name;
    int n = 0;
    std::function<SymMat(const Eigen::VectorXd&)> g;
    Box box;
    std::optional<std::function<ChristoffelMap(const Eigen::VectorXd&)>> analytic_christoffel;
    bool euclidean = false;
    double h_fd = 1e-4;  // centered-difference step for metric derivatives

    SymMat metric_at(const Eigen::VectorXd& x) const { return g(x); }
};

/// Gamma^k_ij = 1/2 sum_l g^{kl} (d_i g_jl + d_j g_il - d_l g_ij); analytic
/// when the chart supplies it, centered differences otherwise.
ChristoffelMap christoffel(const MetricChart& metric, const Eigen::VectorXd& x);

/// Coordinate riemannian hessian: (r, p, A) -> (r, p, A - Gamma_x(p)).
Jet2 riemannian_hessian(const MetricChart& metric, const Eigen::VectorXd& x, const Jet2& j);

/// Frame action (r, p, A) -> (r, h p, h A h^t).
Jet2 frame_transform_jet(const Jet2& j, const Eigen::MatrixXd& h);

/// h = g(x)^{-1/2}: rows form a g-orthonormal coframe.
Eigen::MatrixXd orthonormal_frame(const MetricChart& metric, const Eigen::VectorXd& x);

/// (r, h p, h (A - Gamma(p)) h^t) with h = g^{-1/2}: the jet whose eigenvalue
/// data is metric-intrinsic; margins of O_n-model entries are evaluated here.
Jet2 framed_riemannian_jet(const MetricChart& metric, const Eigen::VectorXd& x, const Jet2& j);

/// Domain given by a defining function rho; interior = {rho < 0}.
struct DomainSpec {
    std::string label;
    std::function<double(const Eigen::VectorXd&)> rho;
    std::optional<std::function<Jet2(const Eigen::VectorXd&)>> analytic_jet;
    double h_fd = 1e-4;

    double operator()(const Eigen::VectorXd& x) const { return rho(x); }
    /// Coordinate 2-jet of rho at x (centered differences unless analytic).
    Jet2 jet(const Eigen::VectorXd& x) const;
};

/// Boundary frame at x on {rho = 0}: g-unit outward normal, a g-orthonormal
/// tangent basis, and the second fundamental form on that basis. Sign fixed
/// so the euclidean ball {|x|^2 < R^2} has II = (1/R) I.
struct BoundaryData {
    Eigen::VectorXd normal;         // coordinate components of the outward normal
    Eigen::MatrixXd tangent_basis;  // columns: framed tangent directions (n x (n-1))
    SymMat ii;                      // (n-1) x (n-1) second fundamental form
    double grad_norm = 0.0;         // |d rho|_g at x

    BoundaryData() : ii(SymMat::zero(1)) {}
};

BoundaryData second_fundamental_form(const MetricChart& metric, const DomainSpec& domain,
                                     const Eigen::VectorXd& x);

struct ConvexityOptions {
    int t_pow_max = 20;  // outer ladder t in {2^k}
    AsymOptions asym;    // inner asymptotic-interior options
};

struct ConvexityVerdict {
    double lambda = 0.0;
    AsymVerdict verdict = AsymVerdict::Undetermined;
    double t0 = 0.0;  // smallest outer ladder value that certifies
};

/// Strict boundary convexity of {rho < 0} at x for each frozen lambda:
/// tests the reduced jet of rho plus t drho o drho against the asymptotic
/// interior over the outer t-ladder.
std::vector<ConvexityVerdict> boundary_convexity_test(
    const Subequation& f, const MetricChart& metric, const DomainSpec& domain,
    const Eigen::VectorXd& x, const std::vector<double>& lambdas,
    const ConvexityOptions& opts = {});

/// Blocked form at a boundary point: (0, n, t P_n + II) membership, testing
/// the same condition through the boundary frame.
AsymResult convexity_blocked(const Subequation& f, const BoundaryData& bd, double lambda,
                             const ConvexityOptions& opts = {});

struct BarrierResult {
    bool found = false;
    double c_big = 0.0;  // barrier scale C
    double eps = 0.0;
    double r0 = 0.0;
    double lambda = 0.0;
    std::string diagnostics;
};

struct BarrierOptions {
    double strictness = 1e-6;  // required c-strictness
    int samples = 1000;
    int eps_pows = 14;   // eps, r0 in {1e-1 * 2^-k}
    int c_pows = 31;     // C in {2^k : k < c_pows}
    std::uint64_t seed = 0xBA221E5;
    double lambda_prime_offset = 1.0;  // convexity is pre-tested at lambda + offset
};

/// Searches (C, eps, r0) so that beta(x) = lambda + C (rho(x) - eps |x-x0|^2 / 2)
/// is c-strict at sampled points of B(x0, r0) for both C and 2C.
BarrierResult make_barrier(const Subequation& f, const MetricChart& metric,
                           const DomainSpec& domain, const Eigen::VectorXd& x0,
                           double lambda, const BarrierOptions& opts = {});

/// Names: euclidean:n=<dim>, s3_tube, s3xs3_tube. Tube coordinates are
/// restricted to delta in [1e-2, pi/2 - 1e-2].
MetricChart builtin_metric(const std::string& name);

/// Closed-form fields on the s3xs3_tube chart: delta_k, u_k = -delta_k^2/2,
/// rho = (delta_1^2 + delta_2^2)/2, with exact coordinate jets.
struct AppendixDFields {
    MetricChart metric;
    std::function<double(const Eigen::VectorXd&)> delta1, delta2, u1, u2, rho;
    std::function<Jet2(const Eigen::VectorXd&)> u1_jet, u2_jet, rho_jet;  // coordinate jets
    double band_lo = 0.0, band_hi = 0.0;
};

AppendixDFields appendix_d_fields();

/// Samples points of {rho = 0} inside the box by bisecting sign changes
/// along random segments.
std::vector<Eigen::VectorXd> sample_boundary_points(const DomainSpec& domain, const Box& box,
                                                    int count, std::uint64_t seed);

}  // namespace subeq
