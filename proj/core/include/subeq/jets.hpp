#pragma once

#include <Eigen/Dense>
#include <vector>

#include "subeq/errors.hpp"

namespace subeq {

/// Dense real symmetric matrix, dimension 1..16. Symmetrized at
/// construction after a max|A_ij - A_ji| <= tol check.
class SymMat {
public:
    static constexpr int kMaxDim = 16;

    explicit SymMat(const Eigen::MatrixXd& m, double sym_tol = 1e-12);
    /// Takes ownership without the symmetry gate; for hot paths whose inputs
    /// are symmetric by construction.
    static SymMat trusted(Eigen::MatrixXd&& m);
    /// Mutable storage access for hot paths; the caller keeps it symmetric.
    Eigen::MatrixXd& mut_trusted() { return m_; }
    static SymMat zero(int n) { return SymMat(Eigen::MatrixXd::Zero(n, n)); }
    static SymMat identity(int n) { return SymMat(Eigen::MatrixXd::Identity(n, n)); }

    int dim() const { return int(m_.rows()); }
    const Eigen::MatrixXd& mat() const { return m_; }
    double operator()(int i, int j) const { return m_(i, j); }

    double trace() const { return m_.trace(); }
    double fro_norm() const { return m_.norm(); }

    /// Congruence h A h^t; closed for any invertible (indeed any) real h.
    SymMat congruence(const Eigen::MatrixXd& h) const;

    SymMat operator+(const SymMat& o) const { return SymMat(m_ + o.m_); }
    SymMat operator-(const SymMat& o) const { return SymMat(m_ - o.m_); }
    SymMat operator-() const { return SymMat(-m_); }
    friend SymMat operator*(double s, const SymMat& a) { return SymMat(s * a.m_); }

private:
    Eigen::MatrixXd m_;
};

/// A point (r, p, A) of the 2-jet fiber R x R^n x Sym(n).
struct Jet2 {
    double r = 0.0;
    Eigen::VectorXd p;
    SymMat a;

    Jet2(double r_, Eigen::VectorXd p_, SymMat a_);
    static Jet2 zero(int n) { return Jet2(0.0, Eigen::VectorXd::Zero(n), SymMat::zero(n)); }
    static Jet2 pure_second_order(const SymMat& a) {
        return Jet2(0.0, Eigen::VectorXd::Zero(a.dim()), a);
    }

    int dim() const { return int(p.size()); }
    /// Flat product metric: |J|^2 = r^2 + |p|^2 + ||A||_F^2.
    double norm() const;

    Jet2 operator-() const { return Jet2(-r, -p, -a); }
    Jet2 operator+(const Jet2& o) const { return Jet2(r + o.r, p + o.p, a + o.a); }
    Jet2 operator-(const Jet2& o) const { return Jet2(r - o.r, p - o.p, a - o.a); }
    friend Jet2 operator*(double s, const Jet2& j) { return Jet2(s * j.r, s * j.p, s * j.a); }
};

/// Eigenvalues in nondecreasing order, multiplicities repeated.
using EigenList = Eigen::VectorXd;

EigenList ordered_eigenvalues(const SymMat& a);

/// Orthogonal almost complex structure on R^{2m}: J^2 = -I, J^t J = I.
struct ComplexStructure {
    Eigen::MatrixXd j;

    explicit ComplexStructure(Eigen::MatrixXd j_, double tol = 1e-12);
    /// Interleaved convention: coordinates (x1, y1, x2, y2, ...) with a
    /// [[0,-1],[1,0]] block per complex coordinate.
    static ComplexStructure standard(int n);
    int dim() const { return int(j.rows()); }
};

/// Orthogonal structures I, J, K on R^{4m} with I^2=J^2=K^2=-1, IJ=K, JK=I, KI=J.
struct QuaternionicStructure {
    Eigen::MatrixXd qi, qj, qk;

    QuaternionicStructure(Eigen::MatrixXd i_, Eigen::MatrixXd j_, Eigen::MatrixXd k_,
                          double tol = 1e-12);
    /// Blockwise left multiplication by i, j, k on each H = R^4 factor.
    static QuaternionicStructure standard(int n);
    int dim() const { return int(qi.rows()); }
};

/// Orthogonal projection onto a p-plane: P^2 = P, P^t = P, trace P = p.
struct PlaneProjector {
    SymMat p_xi;
    int pdim = 0;

    PlaneProjector(SymMat p, int pdim_, double tol = 1e-10);
    /// Projector onto the span of the (orthonormalized) columns of `basis`.
    static PlaneProjector from_basis(const Eigen::MatrixXd& basis);
    int dim() const { return p_xi.dim(); }
};

/// 1/2 (A - JAJ); commutes with J, spectrum has even multiplicities.
SymMat hermitian_part(const SymMat& a, const ComplexStructure& c);

/// 1/4 (A - IAI - JAJ - KAK); commutes with I, J, K; idempotent projection.
SymMat hermitian_part(const SymMat& a, const QuaternionicStructure& q);

/// <A, P_xi> = trace of the restriction of A to the plane.
double trace_on_plane(const SymMat& a, const PlaneProjector& xi);

/// All C(n,p) p-fold eigenvalue sums of A, sorted ascending.
std::vector<double> pfold_eigen_sums(const SymMat& a, int p);

/// Elementary symmetric functions (sigma_1, ..., sigma_n) of the spectrum.
Eigen::VectorXd sigma_elementary(const SymMat& a);

/// Negated real roots of s -> sigma_k(A + sI), sorted ascending.
/// Coefficients are Sum_j C(n-j, k-j) sigma_j(A) s^{k-j}; hyperbolicity makes
/// all roots real, and imaginary residue above 1e-8 (relative) is an
/// InternalDefect.
std::vector<double> garding_roots_sigma_k(const SymMat& a, int k);

/// Euclidean-Frobenius distance in the jet fiber.
double jet_distance(const Jet2& j1, const Jet2& j2);

double binomial(int n, int k);

}  // namespace subeq
