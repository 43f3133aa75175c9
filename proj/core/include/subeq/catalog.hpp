#pragma once

#include <map>
#include <string>

#include "subeq/subequation.hpp"

namespace subeq {

/// Budgets for the sampled plane minimizers (LAG, associative, Grassmann).
struct PlaneSearchBudget {
    int samples = 10000;   // random plane draws
    int starts = 64;       // local descent starts (kept best draws)
    int iters = 300;       // descent iterations per start
    double tol = 1e-8;     // descent stopping tolerance
    std::uint64_t seed = 0xA11CEull;
};

/// min over p-planes of tr_xi A (exhaustive value is lambda_1 + ... + lambda_p).
double min_trace_over_planes(const SymMat& a, int p, const PlaneSearchBudget& b = {});

/// min over Lagrangian n-planes in C^n = R^{2n} (interleaved coordinates).
double min_trace_over_lagrangian(const SymMat& a, const PlaneSearchBudget& b = {});

/// min over associative 3-planes in R^7 (octonion cross-product frames).
double min_trace_over_associative(const SymMat& a, const PlaneSearchBudget& b = {});

/// Octonion product on R^8 (Cayley-Dickson over H); index 0 is the real part.
Eigen::VectorXd octonion_mul(const Eigen::VectorXd& u, const Eigen::VectorXd& v);
/// Cross product of imaginary octonions u, v in R^7: Im(u * v).
Eigen::VectorXd cross7(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

// ---- structured constructors -------------------------------------------

Subequation make_laplace(int n);
Subequation make_pq(int n, int q);
Subequation make_pq_complex(int n, int q);
Subequation make_pq_quaternionic(int n, int q);
Subequation make_sigma_branch(int n, int k, int j);
Subequation make_special_lagrangian(int n, double c);
Subequation make_grassmann_p(int n, int p);
Subequation make_lag(int complex_n, const PlaneSearchBudget& budget = {});
Subequation make_calibration_associative(const PlaneSearchBudget& budget = {});
Subequation make_eikonal(int n);
Subequation make_inf_laplace(int n);
Subequation make_p_laplace(int n, double k);
Subequation make_minimal_surface(int n);
/// kappa(p, A) = eigenvalues of (1/nu) E A E; margin = inner margin at that
/// matrix. `inner` must be pure second-order with a permutation-invariant
/// eigenvalue margin.
Subequation make_graph_curvature(const Subequation& inner);
/// sign = -1: lambda_1(A - s(p)) >= 0 with s(p) = |p|^{1/2}(I + P_[p])/2;
/// sign = +1: lambda_1(A + s(p)) >= 0. The Dirichlet dual of the minus entry
/// computes to lambda_n(A + s(p)) >= 0, which is weaker than the plus entry;
/// both margins ship.
Subequation make_example_12_8(int n, int sign);
Subequation make_monge_ampere_exp(int n);
/// min( lambda_1^C(A_C + I), prod_i max(mu_i, 0) - Fmono(r) f(x) ) where mu_i
/// are the complex eigenvalues of A_C + I. Fmono must be nondecreasing, > 0.
Subequation make_calabi_yau(int n, std::function<double(const Eigen::VectorXd&)> f,
                            std::function<double(double)> fmono, bool fmono_constant,
                            const std::string& param_label = "");
/// Circular cone about J_c with Lipschitz aperture gamma, in graphed form:
/// margin(K) = <K, J_c>/|J_c|^2 - gamma |K - proj K| / |J_c| ... expressed so
/// the boundary is the gamma-Lipschitz graph over J_c^perp.
Subequation make_circular_cone(const Jet2& jc, double gamma);
Subequation make_intersection(const Subequation& f1, const Subequation& f2);

/// Enlarged monotonicity subequation M + (R_- x {0} x P) for a cone entry.
MonotoneSet monotone_from_subequation(const Subequation& f, int member_tries = 64);

// ---- string-addressable factory ----------------------------------------

struct EntrySpec {
    std::string name;
    std::map<std::string, std::string> params;  // canonical: sorted keys
};

/// Grammar: name(:key=value(,key=value)*)? with parenthesized values allowed
/// for nested specs; canonical form sorts keys alphabetically.
EntrySpec parse_entry_spec(const std::string& text);
std::string canonical_spec(const EntrySpec& spec);

Subequation catalog_construct(const std::string& spec_text);

struct CatalogEntryInfo {
    std::string name;
    std::string params;       // parameter grammar
    std::string margin_desc;  // formula summary
    std::string dual_desc;
    std::string notes;
};
std::vector<CatalogEntryInfo> catalog_list();

}  // namespace subeq
