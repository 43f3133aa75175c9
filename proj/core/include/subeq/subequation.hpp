#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "subeq/jets.hpp"
#include "subeq/rng.hpp"

namespace subeq {

/// Margin evaluated at a base point x and a jet J. Membership convention:
/// J is in F_x iff margin(x, J) >= 0; the interior is {margin > 0} on the
/// generic stratum.
using MarginFn = std::function<double(const Eigen::VectorXd& x, const Jet2& j)>;

struct SubeqFlags {
    bool reduced = false;            // independent of the r entry
    bool pure_second_order = false;  // depends on A only
    bool cone = false;               // sign of margin invariant under J -> tJ, t > 0
    bool constant_coefficient = true;
    bool approximate = false;        // margin is a sampled/minimized upper bound
    bool monotone_cone_model = false;  // models a monotonicity cone, (P)/(N) not claimed
};

/// A named constraint set on 2-jet fibers, represented by a continuous
/// margin function together with a hand-derived dual margin.
struct Subequation {
    std::string name;
    int dim = 0;
    MarginFn margin_fn;
    MarginFn dual_margin_fn;
    SubeqFlags flags;
    std::optional<double> lipschitz_bound;  // of the margin w.r.t. the jet metric
    std::string invariance_note;
    std::string dual_name;  // display name of the dual entry

    double margin(const Eigen::VectorXd& x, const Jet2& j) const { return margin_fn(x, j); }
    double dual_margin(const Eigen::VectorXd& x, const Jet2& j) const {
        return dual_margin_fn(x, j);
    }
    double margin0(const Jet2& j) const {
        return margin_fn(Eigen::VectorXd::Zero(dim), j);
    }
};

enum class Region { Inside, Boundary, Outside };

Region contains(const Subequation& f, const Eigen::VectorXd& x, const Jet2& j,
                double tol = 1e-9);

/// Dirichlet dual: swaps the hand margins, so the double dual restores the
/// entry bitwise. The generic negation rule m~(x, J) = -m(x, -J) is available
/// as negation_dual_margin for cross-checks.
Subequation dual(const Subequation& f);
double negation_dual_margin(const Subequation& f, const Eigen::VectorXd& x, const Jet2& j);

/// Fiberwise translation F + J0(x): margin'(x, J) = margin(x, J - J0(x));
/// the dual translates by -J0.
Subequation translate(const Subequation& f,
                       std::function<Jet2(const Eigen::VectorXd&)> j0,
                       const std::string& suffix = "+J0");

/// Invertible affine action on the jet fiber:
///   Phi(r, p, A) = (r, g p, h A h^t + L(p)) + J0,   all optionally x-varying.
struct AffineJetMap {
    int dim = 0;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> g;  // invertible
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> h;  // invertible
    // Linear map p -> Sym(n); zero when absent.
    std::function<SymMat(const Eigen::VectorXd&, const Eigen::VectorXd&)> l;
    std::function<Jet2(const Eigen::VectorXd&)> j0;  // offset; zero when absent

    static AffineJetMap identity(int n);
    Jet2 apply(const Eigen::VectorXd& x, const Jet2& j) const;
    Jet2 apply_linear(const Eigen::VectorXd& x, const Jet2& j) const;  // without J0
    Jet2 apply_inverse(const Eigen::VectorXd& x, const Jet2& j) const;
};

/// Pullback margin'(x, J) = margin(x, Phi_x(J)); the dual margin uses Phi
/// with the J0 offset negated.
Subequation affine_transform(const Subequation& f, const AffineJetMap& phi,
                             const std::string& suffix = "@Phi");

/// Monotonicity set candidate with the same margin representation.
struct MonotoneSet {
    std::string name;
    int dim = 0;
    MarginFn margin_fn;
    bool convex_cone = false;
    /// Draws a member jet (used by the sampled monotonicity check).
    std::function<Jet2(Rng&)> sample;

    double margin(const Eigen::VectorXd& x, const Jet2& j) const { return margin_fn(x, j); }
};

/// M = {(0, 0, P) : P >= 0}, the pure positivity cone.
MonotoneSet pure_p_cone(int n);
/// M = R_- x {0} x P, the (N)+(P) cone.
MonotoneSet negativity_positivity_cone(int n);

struct MonotonicityReport {
    int samples = 0;
    std::uint64_t seed = 0;
    double min_margin = 0.0;
    bool pass = false;
    Jet2 worst_base;    // boundary-ish jet of F
    Jet2 worst_shift;   // sampled member of M
    MonotonicityReport() : worst_base(Jet2::zero(1)), worst_shift(Jet2::zero(1)) {}
};

/// Draws `samples` pairs (J in F near its boundary, J_M in M) and reports
/// min margin(J + J_M); pass iff min >= -1e-8. Seed-deterministic.
MonotonicityReport monotonicity_check(const Subequation& f, const MonotoneSet& m,
                                      int samples, std::uint64_t seed);

struct CStrictResult {
    bool certified = false;
    std::optional<Jet2> witness;  // a jet within distance c with negative margin
};

/// Sufficient certificate margin(x,J)/L >= c (then the ball B(J, c) lies in
/// F_x); otherwise a 64-direction probe at radius c may attach a witness.
CStrictResult c_strict_contains(const Subequation& f, const Eigen::VectorXd& x,
                                const Jet2& j, double c, std::uint64_t seed = 0x5eed);

enum class AsymVerdict { Yes, No, Undetermined };

struct AsymResult {
    AsymVerdict verdict = AsymVerdict::Undetermined;
    double t0 = 0.0;          // smallest ladder value certified (Yes only)
    double top_min_margin = 0.0;
};

struct AsymOptions {
    double lambda = 0.0;      // frozen r entry
    int t_pow_max = 20;       // ladder t in {2^k : 0 <= k <= t_pow_max}
    int neighbors = 128;
    double radius_scale = 1e-2;  // eta = radius_scale * (1 + |J|)
    std::uint64_t seed = 0x5eed;
};

/// Membership of the reduced jet (p, A) in the asymptotic interior of F
/// frozen at r = lambda. Exact (margin > 0) for cone-flagged reduced entries;
/// otherwise a sampled t-ladder check. Undetermined is an honest verdict.
AsymResult asymptotic_interior_contains(const Subequation& f, const Eigen::VectorXd& x,
                                        const Eigen::VectorXd& p, const SymMat& a,
                                        const AsymOptions& opts = {});

/// f(mu) = inf { t : margin(diag(mu) + tI) >= 0 } by bisection to 1e-10,
/// for pure-eigenvalue entries; mu should sum to 0.
double eigen_boundary_graph(const Subequation& f, const Eigen::VectorXd& mu);

/// Diagnostic probe for the topological condition: near-boundary jets should
/// have nearby interior jets. Returns the fraction of probes that succeed.
double t_condition_probe(const Subequation& f, int samples, std::uint64_t seed);

/// Random jet with Gaussian entries (scale on every slot).
Jet2 random_jet(Rng& rng, int n, double scale = 1.0);

/// Walks a random segment to locate a jet with |margin| <= band, margin >= 0.
/// Returns nullopt when no sign change is found along the sampled directions.
std::optional<Jet2> sample_near_boundary(const Subequation& f, const Eigen::VectorXd& x,
                                         Rng& rng, double band = 1e-7, int tries = 16);

}  // namespace subeq
