#include "subeq/jets.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace subeq {

SymMat::SymMat(const Eigen::MatrixXd& m, double sym_tol) {
    if (m.rows() != m.cols())
        throw InvalidArgument("SymMat: matrix must be square");
    const int n = int(m.rows());
    if (n < 1 || n > kMaxDim)
        throw InvalidArgument("SymMat: dimension must be in [1, 16]");
    const double skew = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (skew > sym_tol)
        throw InvalidArgument("SymMat: asymmetry " + std::to_string(skew) +
                              " exceeds tolerance");
    m_ = 0.5 * (m + m.transpose());
}

SymMat SymMat::trusted(Eigen::MatrixXd&& m) {
    SymMat out(Eigen::MatrixXd::Zero(1, 1));
    out.m_ = std::move(m);
    return out;
}

SymMat SymMat::congruence(const Eigen::MatrixXd& h) const {
    if (h.rows() != dim() || h.cols() != dim())
        throw InvalidArgument("SymMat::congruence: dimension mismatch");
    Eigen::MatrixXd r = h * m_ * h.transpose();
    // Symmetric up to roundoff; re-symmetrize without the tolerance gate.
    return SymMat(0.5 * (r + r.transpose()), 1e300);
}

Jet2::Jet2(double r_, Eigen::VectorXd p_, SymMat a_) : r(r_), p(std::move(p_)), a(std::move(a_)) {
    if (int(p.size()) != a.dim())
        throw InvalidArgument("Jet2: gradient and hessian dimensions differ");
}

double Jet2::norm() const {
    return std::sqrt(r * r + p.squaredNorm() + a.mat().squaredNorm());
}

EigenList ordered_eigenvalues(const SymMat& a) {
    const int n = a.dim();
    if (n == 1) {
        EigenList lam(1);
        lam[0] = a(0, 0);
        return lam;
    }
    if (n == 2) {
        const double tr = a(0, 0) + a(1, 1);
        const double off = a(0, 1);
        const double gap = a(0, 0) - a(1, 1);
        const double disc = std::sqrt(gap * gap + 4.0 * off * off);
        EigenList lam(2);
        lam[0] = 0.5 * (tr - disc);
        lam[1] = 0.5 * (tr + disc);
        return lam;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    if (n == 3)
        es.computeDirect(a.mat(), Eigen::EigenvaluesOnly);
    else
        es.compute(a.mat(), Eigen::EigenvaluesOnly);
    return es.eigenvalues();  // ascending
}

ComplexStructure::ComplexStructure(Eigen::MatrixXd j_, double tol) : j(std::move(j_)) {
    const int n = int(j.rows());
    if (n % 2 != 0 || j.cols() != n)
        throw InvalidArgument("ComplexStructure: even square matrix required");
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    if ((j * j + id).cwiseAbs().maxCoeff() > tol)
        throw InvalidArgument("ComplexStructure: J^2 != -I");
    if ((j.transpose() * j - id).cwiseAbs().maxCoeff() > tol)
        throw InvalidArgument("ComplexStructure: J not orthogonal");
}

ComplexStructure ComplexStructure::standard(int n) {
    if (n % 2 != 0) throw InvalidArgument("ComplexStructure: dimension must be even");
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
    for (int b = 0; b < n / 2; ++b) {
        j(2 * b, 2 * b + 1) = -1.0;
        j(2 * b + 1, 2 * b) = 1.0;
    }
    return ComplexStructure(j);
}

QuaternionicStructure::QuaternionicStructure(Eigen::MatrixXd i_, Eigen::MatrixXd j_,
                                             Eigen::MatrixXd k_, double tol)
    : qi(std::move(i_)), qj(std::move(j_)), qk(std::move(k_)) {
    const int n = int(qi.rows());
    if (n % 4 != 0 || qj.rows() != n || qk.rows() != n)
        throw InvalidArgument("QuaternionicStructure: dimension must be divisible by 4");
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    auto chk = [&](const Eigen::MatrixXd& m, const Eigen::MatrixXd& want, const char* what) {
        if ((m - want).cwiseAbs().maxCoeff() > tol)
            throw InvalidArgument(std::string("QuaternionicStructure: ") + what);
    };
    chk(qi * qi, -id, "I^2 != -I");
    chk(qj * qj, -id, "J^2 != -I");
    chk(qk * qk, -id, "K^2 != -I");
    chk(qi * qj, qk, "IJ != K");
    chk(qj * qk, qi, "JK != I");
    chk(qk * qi, qj, "KI != J");
    chk(qi.transpose() * qi, id, "I not orthogonal");
}

QuaternionicStructure QuaternionicStructure::standard(int n) {
    if (n % 4 != 0) throw InvalidArgument("QuaternionicStructure: dimension must be divisible by 4");
    Eigen::MatrixXd li = Eigen::MatrixXd::Zero(n, n), lj = li, lk = li;
    // Left multiplication by i, j, k on H = span(1, i, j, k).
    const double bi[4][4] = {{0, -1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, -1}, {0, 0, 1, 0}};
    const double bj[4][4] = {{0, 0, -1, 0}, {0, 0, 0, 1}, {1, 0, 0, 0}, {0, -1, 0, 0}};
    const double bk[4][4] = {{0, 0, 0, -1}, {0, 0, -1, 0}, {0, 1, 0, 0}, {1, 0, 0, 0}};
    for (int b = 0; b < n / 4; ++b)
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) {
                li(4 * b + r, 4 * b + c) = bi[r][c];
                lj(4 * b + r, 4 * b + c) = bj[r][c];
                lk(4 * b + r, 4 * b + c) = bk[r][c];
            }
    return QuaternionicStructure(li, lj, lk);
}

PlaneProjector::PlaneProjector(SymMat p, int pdim_, double tol) : p_xi(std::move(p)), pdim(pdim_) {
    const Eigen::MatrixXd& m = p_xi.mat();
    if ((m * m - m).cwiseAbs().maxCoeff() > tol)
        throw InvalidArgument("PlaneProjector: not idempotent");
    if (std::abs(m.trace() - double(pdim)) > tol)
        throw InvalidArgument("PlaneProjector: trace != plane dimension");
}

PlaneProjector PlaneProjector::from_basis(const Eigen::MatrixXd& basis) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(basis.rows(), basis.cols());
    Eigen::MatrixXd p = q * q.transpose();
    return PlaneProjector(SymMat(0.5 * (p + p.transpose()), 1e300), int(basis.cols()));
}

SymMat hermitian_part(const SymMat& a, const ComplexStructure& c) {
    if (a.dim() != c.dim())
        throw InvalidArgument("hermitian_part: dimension mismatch");
    Eigen::MatrixXd h = 0.5 * (a.mat() - c.j * a.mat() * c.j);
    return SymMat(0.5 * (h + h.transpose()), 1e300);
}

SymMat hermitian_part(const SymMat& a, const QuaternionicStructure& q) {
    if (a.dim() != q.dim())
        throw InvalidArgument("hermitian_part: dimension mismatch");
    Eigen::MatrixXd h = 0.25 * (a.mat() - q.qi * a.mat() * q.qi - q.qj * a.mat() * q.qj -
                                q.qk * a.mat() * q.qk);
    return SymMat(0.5 * (h + h.transpose()), 1e300);
}

double trace_on_plane(const SymMat& a, const PlaneProjector& xi) {
    if (a.dim() != xi.dim())
        throw InvalidArgument("trace_on_plane: dimension mismatch");
    return (a.mat().cwiseProduct(xi.p_xi.mat())).sum();
}

std::vector<double> pfold_eigen_sums(const SymMat& a, int p) {
    const int n = a.dim();
    if (p < 1 || p > n)
        throw InvalidArgument("pfold_eigen_sums: p out of range");
    EigenList lam = ordered_eigenvalues(a);
    std::vector<double> sums;
    std::vector<int> idx(p);
    for (int i = 0; i < p; ++i) idx[i] = i;
    while (true) {
        double s = 0.0;
        for (int i : idx) s += lam[i];
        sums.push_back(s);
        int i = p - 1;
        while (i >= 0 && idx[i] == n - p + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < p; ++j) idx[j] = idx[j - 1] + 1;
    }
    std::sort(sums.begin(), sums.end());
    return sums;
}

Eigen::VectorXd sigma_elementary(const SymMat& a) {
    const int n = a.dim();
    EigenList lam = ordered_eigenvalues(a);
    // e_k via incremental expansion of prod (1 + lam_i t).
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n + 1);
    e[0] = 1.0;
    for (int i = 0; i < n; ++i)
        for (int k = i + 1; k >= 1; --k) e[k] += lam[i] * e[k - 1];
    return e.tail(n);
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
    return r;
}

namespace {

// Coefficients of s -> sigma_j(A + sI): coef[d] multiplies s^d, degree j.
Eigen::VectorXd shifted_sigma_coeffs(const Eigen::VectorXd& sig, int n, int j) {
    Eigen::VectorXd coef = Eigen::VectorXd::Zero(j + 1);
    for (int i = 0; i <= j; ++i) {
        const double si = (i == 0) ? 1.0 : sig[i - 1];
        coef[j - i] = binomial(n - i, j - i) * si;
    }
    return coef;
}

double polyval(const Eigen::VectorXd& coef, double s) {
    double v = 0.0;
    for (int d = int(coef.size()) - 1; d >= 0; --d) v = v * s + coef[d];
    return v;
}

double bisect_root(const Eigen::VectorXd& coef, double lo, double hi) {
    double flo = polyval(coef, lo);
    if (flo == 0.0) return lo;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = polyval(coef, mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Real roots of the hyperbolic chain p_j = sigma_j(A + sI): the roots of
// p_{j-1} interlace those of p_j, so each interval holds one bracketed root.
std::vector<double> interlacing_roots(const Eigen::VectorXd& sig, int n, int k) {
    std::vector<double> prev;  // roots of p_{j-1}, ascending
    double bound = 1.0;
    for (int j = 1; j <= k; ++j) {
        Eigen::VectorXd coef = shifted_sigma_coeffs(sig, n, j);
        const double lead = coef[j];
        if (!(lead > 0.0))
            throw InternalDefect("garding_roots_sigma_k: nonpositive leading coefficient");
        for (int d = 0; d < j; ++d)
            bound = std::max(bound, 2.0 * std::abs(coef[d] / lead));
        if (j == 1) {
            prev = {-coef[0] / lead};
            continue;
        }
        std::vector<double> roots;
        for (int i = 0; i <= int(prev.size()); ++i) {
            double lo = (i == 0) ? -bound : prev[i - 1];
            double hi = (i == int(prev.size())) ? bound : prev[i];
            double flo = polyval(coef, lo);
            double fhi = polyval(coef, hi);
            if (flo == 0.0) {
                roots.push_back(lo);
                continue;
            }
            if (fhi == 0.0) {
                roots.push_back(hi);
                continue;
            }
            if ((flo > 0.0) == (fhi > 0.0)) {
                // Degenerate interlacing: the root collapses onto the endpoint
                // where |p_j| is smaller (a multiple root of the chain).
                roots.push_back(std::abs(flo) <= std::abs(fhi) ? lo : hi);
                continue;
            }
            roots.push_back(bisect_root(coef, lo, hi));
        }
        std::sort(roots.begin(), roots.end());
        prev = roots;
    }
    return prev;
}

}  // namespace

std::vector<double> garding_roots_sigma_k(const SymMat& a, int k) {
    const int n = a.dim();
    if (k < 1 || k > n)
        throw InvalidArgument("garding_roots_sigma_k: k out of range");
    Eigen::VectorXd sig = sigma_elementary(a);
    Eigen::VectorXd coef = shifted_sigma_coeffs(sig, n, k);
    const double lead = coef[k];  // C(n, k) > 0
    if (k == 1) {
        // Root s* = -c0/lead; the sigma_1-eigenvalue is -s* = sigma_1(A)/n.
        return {coef[0] / lead};
    }
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(k, k);
    for (int i = 1; i < k; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < k; ++i) comp(i, k - 1) = -coef[i] / lead;
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp);
    std::vector<double> vals;
    double scale = 0.0;
    for (int i = 0; i < k; ++i) scale = std::max(scale, std::abs(es.eigenvalues()[i]));
    bool companion_ok = true;
    for (int i = 0; i < k; ++i) {
        const std::complex<double> z = es.eigenvalues()[i];
        if (std::abs(z.imag()) > 1e-8 * std::max(1.0, scale)) {
            companion_ok = false;
            break;
        }
        vals.push_back(-z.real());
    }
    if (!companion_ok) {
        // Near-degenerate hyperbolic polynomials split a multiple real root
        // into a conjugate pair under the companion eigensolver. The roots of
        // sigma_{k-1}(A + sI) interlace those of sigma_k(A + sI), which gives
        // bracketed bisection targets and keeps every root real.
        std::vector<double> roots = interlacing_roots(sig, n, k);
        const double residual = std::abs(polyval(coef, roots.back())) /
                                std::max(1.0, std::abs(lead));
        if (int(roots.size()) != k || !std::isfinite(residual))
            throw InternalDefect(
                "garding_roots_sigma_k: root finder failed for sigma_" + std::to_string(k) +
                "(A + sI) with coefficients " + [&] {
                    std::string s;
                    for (int d = k; d >= 0; --d) s += std::to_string(coef[d]) + " ";
                    return s;
                }());
        vals.clear();
        for (double r : roots) vals.push_back(-r);
    }
    std::sort(vals.begin(), vals.end());
    return vals;
}

double jet_distance(const Jet2& j1, const Jet2& j2) {
    if (j1.dim() != j2.dim())
        throw InvalidArgument("jet_distance: dimension mismatch");
    return (j1 - j2).norm();
}

}  // namespace subeq
