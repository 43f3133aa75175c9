#include "subeq/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "subeq/expr.hpp"

namespace subeq {

namespace {

Eigen::VectorXd zero_x(int n) { return Eigen::VectorXd::Zero(n); }

double bottom_sum(const SymMat& a, int p) {
    EigenList lam = ordered_eigenvalues(a);
    double s = 0.0;
    for (int i = 0; i < p; ++i) s += lam[i];
    return s;
}

double top_sum(const SymMat& a, int p) {
    EigenList lam = ordered_eigenvalues(a);
    double s = 0.0;
    for (int i = 0; i < p; ++i) s += lam[lam.size() - 1 - i];
    return s;
}

/// Complex eigenvalues of a J-commuting symmetric matrix: the sorted real
/// spectrum comes in pairs; average each adjacent pair.
Eigen::VectorXd complex_eigenvalues(const SymMat& herm) {
    EigenList lam = ordered_eigenvalues(herm);
    const int m = int(lam.size()) / 2;
    Eigen::VectorXd mu(m);
    for (int i = 0; i < m; ++i) mu[i] = 0.5 * (lam[2 * i] + lam[2 * i + 1]);
    return mu;
}

double clamped_product(const Eigen::VectorXd& v) {
    double p = 1.0;
    for (int i = 0; i < v.size(); ++i) p *= std::max(v[i], 0.0);
    return p;
}

/// s(p) = |p|^{1/2} (I + P_[p]) / 2, with s(0) = 0 (closure convention).
Eigen::MatrixXd half_sqrt_grad_term(const Eigen::VectorXd& p) {
    const int n = int(p.size());
    const double np = p.norm();
    if (np == 0.0) return Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd proj = p * p.transpose() / (np * np);
    return 0.5 * std::sqrt(np) * (Eigen::MatrixXd::Identity(n, n) + proj);
}

SubeqFlags pure_cone_flags() {
    SubeqFlags f;
    f.reduced = true;
    f.pure_second_order = true;
    f.cone = true;
    f.constant_coefficient = true;
    return f;
}

}  // namespace

// ---- plane minimizers -----------------------------------------------------

namespace {

double trace_on_frame(const SymMat& a, const Eigen::MatrixXd& frame) {
    double s = 0.0;
    for (int c = 0; c < frame.cols(); ++c) s += frame.col(c).dot(a.mat() * frame.col(c));
    return s;
}

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& m) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    return qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
}

/// Projected gradient descent of tr(V^t A V) on the Stiefel manifold.
double stiefel_descend(const SymMat& a, Eigen::MatrixXd v, int iters, double tol) {
    double f = trace_on_frame(a, v);
    double step = 0.1;
    for (int it = 0; it < iters; ++it) {
        Eigen::MatrixXd grad = 2.0 * a.mat() * v;
        Eigen::MatrixXd tang = grad - v * (v.transpose() * grad);
        const double gn = tang.norm();
        if (gn < tol) break;
        bool moved = false;
        for (int bt = 0; bt < 30; ++bt) {
            Eigen::MatrixXd w = orthonormalize(v - step * tang);
            const double fw = trace_on_frame(a, w);
            if (fw < f - 1e-15) {
                v = w;
                f = fw;
                step *= 1.5;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) break;
    }
    return f;
}

}  // namespace

double min_trace_over_planes(const SymMat& a, int p, const PlaneSearchBudget& b) {
    const int n = a.dim();
    if (p < 1 || p > n) throw InvalidArgument("min_trace_over_planes: p out of range");
    Rng rng(b.seed);
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::pair<double, Eigen::MatrixXd>> keep;
    for (int s = 0; s < b.samples; ++s) {
        Eigen::MatrixXd v = orthonormalize(gauss_matrix(rng, n, p));
        const double f = trace_on_frame(a, v);
        best = std::min(best, f);
        if (int(keep.size()) < std::max(1, b.starts)) {
            keep.emplace_back(f, v);
            std::sort(keep.begin(), keep.end(),
                      [](const auto& l, const auto& r) { return l.first < r.first; });
        } else if (f < keep.back().first) {
            keep.back() = {f, v};
            std::sort(keep.begin(), keep.end(),
                      [](const auto& l, const auto& r) { return l.first < r.first; });
        }
    }
    for (auto& [f0, v] : keep) best = std::min(best, stiefel_descend(a, v, b.iters, b.tol));
    return best;
}

namespace {

/// Realify a complex m-vector into interleaved (Re, Im) coordinates.
Eigen::MatrixXd lagrangian_frame(const Eigen::MatrixXcd& u) {
    const int m = int(u.rows());
    Eigen::MatrixXd v(2 * m, m);
    for (int c = 0; c < m; ++c)
        for (int r = 0; r < m; ++r) {
            v(2 * r, c) = u(r, c).real();
            v(2 * r + 1, c) = u(r, c).imag();
        }
    return v;
}

Eigen::MatrixXcd random_unitary(Rng& rng, int m) {
    Eigen::MatrixXcd g(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) g(i, j) = std::complex<double>(gauss(rng), gauss(rng));
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    Eigen::MatrixXcd q = qr.householderQ();
    return q;
}

double lagrangian_descend(const SymMat& a, Eigen::MatrixXcd u, int iters, double tol) {
    const int m = int(u.rows());
    auto value = [&](const Eigen::MatrixXcd& w) { return trace_on_frame(a, lagrangian_frame(w)); };
    double f = value(u);
    double step = 0.05;
    for (int it = 0; it < iters; ++it) {
        // Euclidean gradient 2 A V pulled back to a complex matrix.
        Eigen::MatrixXd gv = 2.0 * a.mat() * lagrangian_frame(u);
        Eigen::MatrixXcd gc(m, m);
        for (int c = 0; c < m; ++c)
            for (int r = 0; r < m; ++r)
                gc(r, c) = std::complex<double>(gv(2 * r, c), gv(2 * r + 1, c));
        Eigen::MatrixXcd w = u.adjoint() * gc;
        Eigen::MatrixXcd s = 0.5 * (w - w.adjoint());  // skew-hermitian tangent direction
        const double gn = s.norm();
        if (gn < tol) break;
        bool moved = false;
        for (int bt = 0; bt < 30; ++bt) {
            // Cayley retraction along -step * s.
            Eigen::MatrixXcd half = 0.5 * step * s;
            Eigen::MatrixXcd num = Eigen::MatrixXcd::Identity(m, m) - half;
            Eigen::MatrixXcd den = Eigen::MatrixXcd::Identity(m, m) + half;
            Eigen::MatrixXcd w = u * den.inverse() * num;
            const double fw = value(w);
            if (fw < f - 1e-15) {
                u = w;
                f = fw;
                step *= 1.5;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) break;
    }
    return f;
}

}  // namespace

double min_trace_over_lagrangian(const SymMat& a, const PlaneSearchBudget& b) {
    if (a.dim() % 2 != 0)
        throw InvalidArgument("min_trace_over_lagrangian: even dimension required");
    const int m = a.dim() / 2;
    Rng rng(b.seed);
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::pair<double, Eigen::MatrixXcd>> keep;
    const int draws = std::max(b.samples / 4, b.starts);
    for (int s = 0; s < draws; ++s) {
        Eigen::MatrixXcd u = random_unitary(rng, m);
        const double f = trace_on_frame(a, lagrangian_frame(u));
        best = std::min(best, f);
        if (int(keep.size()) < std::max(1, b.starts))
            keep.emplace_back(f, u);
        else if (f < keep.back().first)
            keep.back() = {f, u};
        std::sort(keep.begin(), keep.end(),
                  [](const auto& l, const auto& r) { return l.first < r.first; });
    }
    for (auto& [f0, u] : keep) best = std::min(best, lagrangian_descend(a, u, b.iters, b.tol));
    return best;
}

Eigen::VectorXd octonion_mul(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    if (u.size() != 8 || v.size() != 8)
        throw InvalidArgument("octonion_mul: 8-vectors required");
    auto qmul = [](const Eigen::Vector4d& a, const Eigen::Vector4d& b) {
        Eigen::Vector4d r;
        r[0] = a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3];
        r[1] = a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2];
        r[2] = a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1];
        r[3] = a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0];
        return r;
    };
    auto qconj = [](const Eigen::Vector4d& a) {
        return Eigen::Vector4d(a[0], -a[1], -a[2], -a[3]);
    };
    // Cayley-Dickson: (a, b)(c, d) = (ac - d~ b, d a + b c~).
    Eigen::Vector4d a = u.head<4>(), b = u.tail<4>(), c = v.head<4>(), d = v.tail<4>();
    Eigen::VectorXd out(8);
    out.head<4>() = qmul(a, c) - qmul(qconj(d), b);
    out.tail<4>() = qmul(d, a) + qmul(b, qconj(c));
    return out;
}

Eigen::VectorXd cross7(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    if (u.size() != 7 || v.size() != 7) throw InvalidArgument("cross7: 7-vectors required");
    Eigen::VectorXd ou = Eigen::VectorXd::Zero(8), ov = Eigen::VectorXd::Zero(8);
    ou.tail<7>() = u;
    ov.tail<7>() = v;
    return octonion_mul(ou, ov).tail<7>();
}

namespace {

Eigen::MatrixXd associative_frame(const Eigen::VectorXd& u_raw, const Eigen::VectorXd& v_raw) {
    Eigen::VectorXd u = u_raw.normalized();
    Eigen::VectorXd v = v_raw - v_raw.dot(u) * u;
    const double nv = v.norm();
    if (nv < 1e-12) return Eigen::MatrixXd();
    v /= nv;
    Eigen::VectorXd w = cross7(u, v);
    Eigen::MatrixXd frame(7, 3);
    frame.col(0) = u;
    frame.col(1) = v;
    frame.col(2) = w;
    return frame;
}

}  // namespace

double min_trace_over_associative(const SymMat& a, const PlaneSearchBudget& b) {
    if (a.dim() != 7) throw InvalidArgument("min_trace_over_associative: dimension 7 required");
    Rng rng(b.seed);
    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd bu, bv;
    for (int s = 0; s < b.samples; ++s) {
        Eigen::VectorXd u = gauss_vector(rng, 7), v = gauss_vector(rng, 7);
        Eigen::MatrixXd frame = associative_frame(u, v);
        if (frame.size() == 0) continue;
        const double f = trace_on_frame(a, frame);
        if (f < best) {
            best = f;
            bu = frame.col(0);
            bv = frame.col(1);
        }
    }
    // Shrinking-step local refinement around the best sampled frame.
    double sigma = 0.2;
    for (int it = 0; it < b.iters; ++it) {
        bool improved = false;
        for (int k = 0; k < 16; ++k) {
            Eigen::VectorXd u = bu + gauss_vector(rng, 7, sigma);
            Eigen::VectorXd v = bv + gauss_vector(rng, 7, sigma);
            Eigen::MatrixXd frame = associative_frame(u, v);
            if (frame.size() == 0) continue;
            const double f = trace_on_frame(a, frame);
            if (f < best - 1e-15) {
                best = f;
                bu = frame.col(0);
                bv = frame.col(1);
                improved = true;
            }
        }
        if (!improved) {
            sigma *= 0.5;
            if (sigma < b.tol) break;
        }
    }
    return best;
}

// ---- catalog entries --------------------------------------------------------

Subequation make_laplace(int n) {
    Subequation f;
    f.name = "laplace:n=" + std::to_string(n);
    f.dual_name = f.name;
    f.dim = n;
    f.flags = pure_cone_flags();
    f.lipschitz_bound = std::sqrt(double(n));
    f.invariance_note = "O_n; self-dual";
    f.margin_fn = [](const Eigen::VectorXd&, const Jet2& j) { return j.a.trace(); };
    f.dual_margin_fn = f.margin_fn;
    return f;
}

Subequation make_pq(int n, int q) {
    if (q < 1 || q > n) throw InvalidArgument("Pq: q out of range");
    Subequation f;
    f.name = "Pq:n=" + std::to_string(n) + ",q=" + std::to_string(q);
    f.dual_name = "Pq:n=" + std::to_string(n) + ",q=" + std::to_string(n - q + 1);
    f.dim = n;
    f.flags = pure_cone_flags();
    f.lipschitz_bound = 1.0;
    f.invariance_note = "O_n";
    f.margin_fn = [q](const Eigen::VectorXd&, const Jet2& j) {
        return ordered_eigenvalues(j.a)[q - 1];
    };
    f.dual_margin_fn = [n, q](const Eigen::VectorXd&, const Jet2& j) {
        return ordered_eigenvalues(j.a)[n - q];
    };
    return f;
}

Subequation make_pq_complex(int n, int q) {
    if (n % 2 != 0) throw InvalidArgument("Pq_complex: even dimension required");
    if (q < 1 || q > n) throw InvalidArgument("Pq_complex: q out of range");
    ComplexStructure c = ComplexStructure::standard(n);
    Subequation f;
    f.name = "Pq_complex:n=" + std::to_string(n) + ",q=" + std::to_string(q);
    f.dual_name = "Pq_complex:n=" + std::to_string(n) + ",q=" + std::to_string(n - q + 1);
    f.dim = n;
    f.flags = pure_cone_flags();
    f.lipschitz_bound = 1.0;
    f.invariance_note = "U_{n/2}";
    f.margin_fn = [c, q](const Eigen::VectorXd&, const Jet2& j) {
        return ordered_eigenvalues(hermitian_part(j.a, c))[q - 1];
    };
    f.dual_margin_fn = [c, n, q](const Eigen::VectorXd&, const Jet2& j) {
        return ordered_eigenvalues(hermitian_part(j.a, c))[n - q];
    };
    return f;
}

Subequation make_pq_quaternionic(int n, int q) {
    if (n % 4 != 0) throw InvalidArgument("Pq_quaternionic: dimension divisible by 4 required");
    if (q < 1 || q > n) throw InvalidArgument("Pq_quaternionic: q out of range");
    QuaternionicStructure s = QuaternionicStructure::standard(n);
    Subequation f;
    f.name = "Pq_quaternionic:n=" + std::to_string(n) + ",q=" + std::to_string(q);
    f.dual_name = "Pq_quaternionic:n=" + std::to_string(n) + ",q=" + std::to_string(n - q + 1);
    f.dim = n;
    f.flags = pure_cone_flags();
    f.lipschitz_bound = 1.0;
    f.invariance_note = "Sp_{n/4}.Sp_1";
    f.margin_fn = [s, q](const Eigen::VectorXd&, const Jet2& j) {
        return ordered_eigenvalues(hermitian_part(j.a, s))[q - 1];
    };
    f.dual_margin_fn = [s, n, q](const Eigen::VectorXd&, const Jet2& j) {
        return ordered_eigenvalues(hermitian_part(j.a, s))[n - q];
    };
    return f;
}

Subequation make_sigma_branch(int n, int k, int j) {
    if (k < 1 || k > n) throw InvalidArgument("sigma_branch: k out of range");
    if (j < 1 || j > k) throw InvalidArgument("sigma_branch: j out of range");
    Subequation f;
    f.name = "sigma_branch:j=" + std::to_string(j) + ",k=" + std::to_string(k) +
             ",n=" + std::to_string(n);
    f.dual_name = "sigma_branch:j=" + std::to_string(k - j + 1) + ",k=" + std::to_string(k) +
                  ",n=" + std::to_string(n);
    f.dim = n;
    f.flags = pure_cone_flags();
    f.lipschitz_bound = 1.0;
    f.invariance_note = "O_n";
    f.margin_fn = [k, j](const Eigen::VectorXd&, const Jet2& jet) {
        return garding_roots_sigma_k(jet.a, k)[j - 1];
    };
    f.dual_margin_fn = [k, j](const Eigen::VectorXd&, const Jet2& jet) {
        return garding_roots_sigma_k(jet.a, k)[k - j];
    };
    return f;
}

Subequation make_special_lagrangian(int n, double c) {
    if (std::abs(c) >= n) throw InvalidArgument("special_lagrangian: |c| < n required");
    Subequation f;
    std::ostringstream nm, dn;
    nm << "special_lagrangian:c=" << c << ",n=" << n;
    dn << "special_lagrangian:c=" << -c << ",n=" << n;
    f.name = nm.str();
    f.dual_name = dn.str();
    f.dim = n;
    f.flags = pure_cone_flags();
    f.flags.cone = false;
    f.lipschitz_bound = std::sqrt(double(n));
    f.invariance_note = "O_n";
    const double pi = 3.14159265358979323846;
    f.margin_fn = [c, pi](const Eigen::VectorXd&, const Jet2& j) {
        EigenList lam = ordered_eigenvalues(j.a);
        double s = 0.0;
        for (int i = 0; i < lam.size(); ++i) s += std::atan(lam[i]);
        return s - c * pi / 2.0;
    };
    f.dual_margin_fn = [c, pi](const Eigen::VectorXd&, const Jet2& j) {
        EigenList lam = ordered_eigenvalues(j.a);
        double s = 0.0;
        for (int i = 0; i < lam.size(); ++i) s += std::atan(lam[i]);
        return s + c * pi / 2.0;
    };
    return f;
}

Subequation make_grassmann_p(int n, int p) {
    if (p < 1 || p > n) throw InvalidArgument("grassmann_p: p out of range");
    Subequation f;
    f.name = "grassmann_p:n=" + std::to_string(n) + ",p=" + std::to_string(p);
    f.dim = n;
    f.flags = pure_cone_flags();
    f.lipschitz_bound = std::sqrt(double(p));
    f.invariance_note = "O_n; dual margin is the top p-fold eigenvalue sum";
    f.margin_fn = [p](const Eigen::VectorXd&, const Jet2& j) { return bottom_sum(j.a, p); };
    f.dual_margin_fn = [p](const Eigen::VectorXd&, const Jet2& j) { return top_sum(j.a, p); };
    return f;
}

Subequation make_lag(int complex_n, const PlaneSearchBudget& budget) {
    Subequation f;
    f.name = "lag:n=" + std::to_string(complex_n);
    f.dim = 2 * complex_n;
    f.flags = pure_cone_flags();
    f.flags.approximate = true;
    f.lipschitz_bound = std::sqrt(double(complex_n));
    f.invariance_note = "U_n; sampled multi-start minimization, margin is an upper bound";
    f.margin_fn = [budget](const Eigen::VectorXd&, const Jet2& j) {
        return min_trace_over_lagrangian(j.a, budget);
    };
    f.dual_margin_fn = [budget](const Eigen::VectorXd&, const Jet2& j) {
        return -min_trace_over_lagrangian(-j.a, budget);
    };
    return f;
}

Subequation make_calibration_associative(const PlaneSearchBudget& budget) {
    Subequation f;
    f.name = "calibration_associative";
    f.dim = 7;
    f.flags = pure_cone_flags();
    f.flags.approximate = true;
    f.lipschitz_bound = std::sqrt(3.0);
    f.invariance_note = "G_2; sampled associative 3-planes, margin is an upper bound";
    f.margin_fn = [budget](const Eigen::VectorXd&, const Jet2& j) {
        return min_trace_over_associative(j.a, budget);
    };
    f.dual_margin_fn = [budget](const Eigen::VectorXd&, const Jet2& j) {
        return -min_trace_over_associative(-j.a, budget);
    };
    return f;
}

Subequation make_eikonal(int n) {
    Subequation f;
    f.name = "eikonal:n=" + std::to_string(n);
    f.dim = n;
    f.flags.reduced = true;
    f.invariance_note = "O_n; empty asymptotic interior";
    f.lipschitz_bound = 1.0;
    f.margin_fn = [](const Eigen::VectorXd&, const Jet2& j) { return 1.0 - j.p.norm(); };
    f.dual_margin_fn = [](const Eigen::VectorXd&, const Jet2& j) { return j.p.norm() - 1.0; };
    return f;
}

Subequation make_inf_laplace(int n) {
    Subequation f;
    f.name = "inf_laplace:n=" + std::to_string(n);
    f.dual_name = f.name;
    f.dim = n;
    f.flags.reduced = true;
    f.flags.cone = true;
    f.invariance_note = "O_n; self-dual; p = 0 fiber uses lambda_n(A) (closure convention)";
    f.margin_fn = [](const Eigen::VectorXd&, const Jet2& j) {
        const double n2 = j.p.squaredNorm();
        if (n2 == 0.0) {
            EigenList lam = ordered_eigenvalues(j.a);
            return lam[lam.size() - 1];
        }
        return j.p.dot(j.a.mat() * j.p) / n2;
    };
    f.dual_margin_fn = f.margin_fn;
    return f;
}

Subequation make_p_laplace(int n, double k) {
    if (k < 1.0) throw InvalidArgument("p_laplace: k >= 1 required for positivity");
    Subequation f;
    std::ostringstream nm;
    nm << "p_laplace:k=" << k << ",n=" << n;
    f.name = nm.str();
    f.dual_name = f.name;
    f.dim = n;
    f.flags.reduced = true;
    f.flags.cone = true;
    f.invariance_note = "O_n; self-dual (odd in A)";
    f.margin_fn = [k](const Eigen::VectorXd&, const Jet2& j) {
        return j.p.squaredNorm() * j.a.trace() + (k - 2.0) * j.p.dot(j.a.mat() * j.p);
    };
    f.dual_margin_fn = f.margin_fn;
    return f;
}

Subequation make_minimal_surface(int n) {
    Subequation f;
    f.name = "minimal_surface:n=" + std::to_string(n);
    f.dual_name = f.name;
    f.dim = n;
    f.flags.reduced = true;
    f.invariance_note = "O_n; self-dual (odd in A)";
    f.margin_fn = [](const Eigen::VectorXd&, const Jet2& j) {
        return (1.0 + j.p.squaredNorm()) * j.a.trace() - j.p.dot(j.a.mat() * j.p);
    };
    f.dual_margin_fn = f.margin_fn;
    return f;
}

Subequation make_graph_curvature(const Subequation& inner) {
    if (!inner.flags.pure_second_order)
        throw InvalidArgument("graph_curvature: inner entry must be pure second-order");
    const int n = inner.dim;
    auto curvature_matrix = [n](const Jet2& j) {
        const double nu = std::sqrt(1.0 + j.p.squaredNorm());
        Eigen::MatrixXd e = Eigen::MatrixXd::Identity(n, n) -
                            j.p * j.p.transpose() / (nu * (1.0 + nu));
        Eigen::MatrixXd m = e * j.a.mat() * e / nu;
        return SymMat(0.5 * (m + m.transpose()), 1e300);
    };
    Subequation f;
    f.name = "graph_curvature(" + inner.name + ")";
    f.dual_name = "graph_curvature(" +
                  (inner.dual_name.empty() ? inner.name + "~" : inner.dual_name) + ")";
    f.dim = n;
    f.flags.reduced = true;
    f.flags.constant_coefficient = inner.flags.constant_coefficient;
    f.invariance_note = "principal curvatures of the graph fed to " + inner.name;
    auto im = inner.margin_fn;
    auto id = inner.dual_margin_fn;
    f.margin_fn = [im, curvature_matrix](const Eigen::VectorXd& x, const Jet2& j) {
        return im(x, Jet2::pure_second_order(curvature_matrix(j)));
    };
    f.dual_margin_fn = [id, curvature_matrix](const Eigen::VectorXd& x, const Jet2& j) {
        return id(x, Jet2::pure_second_order(curvature_matrix(j)));
    };
    return f;
}

Subequation make_example_12_8(int n, int sign) {
    if (sign != -1 && sign != 1) throw InvalidArgument("example_12_8: sign must be +/-1");
    Subequation f;
    f.name = std::string("example_12_8:sign=") + (sign < 0 ? "minus" : "plus") +
             ",n=" + std::to_string(n);
    f.dim = n;
    f.flags.reduced = true;
    f.invariance_note =
        "O_n; computed dual is lambda_n(A + s(p)) >= 0, strictly weaker than the "
        "opposite-sign lambda_1 entry; both margins ship";
    const double sg = double(sign);
    f.margin_fn = [sg](const Eigen::VectorXd&, const Jet2& j) {
        Eigen::MatrixXd m = j.a.mat() + sg * half_sqrt_grad_term(j.p);
        return ordered_eigenvalues(SymMat(0.5 * (m + m.transpose()), 1e300))[0];
    };
    // Dirichlet dual computed from ~(-Int F).
    f.dual_margin_fn = [sg](const Eigen::VectorXd&, const Jet2& j) {
        Eigen::MatrixXd m = j.a.mat() - sg * half_sqrt_grad_term(j.p);
        EigenList lam = ordered_eigenvalues(SymMat(0.5 * (m + m.transpose()), 1e300));
        return lam[lam.size() - 1];
    };
    return f;
}

Subequation make_monge_ampere_exp(int n) {
    Subequation f;
    f.name = "monge_ampere_exp:n=" + std::to_string(n);
    f.dim = n;
    f.flags.reduced = false;
    f.invariance_note = "O_n; branch lambda_1 >= 0 of det = e^r";
    f.margin_fn = [](const Eigen::VectorXd&, const Jet2& j) {
        EigenList lam = ordered_eigenvalues(j.a);
        return std::min(lam[0], clamped_product(lam) - std::exp(j.r));
    };
    f.dual_margin_fn = [](const Eigen::VectorXd&, const Jet2& j) {
        EigenList lam = ordered_eigenvalues(j.a);
        double prod_neg = 1.0;
        for (int i = 0; i < lam.size(); ++i) prod_neg *= std::max(-lam[i], 0.0);
        return std::max(lam[lam.size() - 1], std::exp(-j.r) - prod_neg);
    };
    return f;
}

Subequation make_calabi_yau(int n, std::function<double(const Eigen::VectorXd&)> f_of_x,
                            std::function<double(double)> fmono, bool fmono_constant,
                            const std::string& param_label) {
    if (n % 2 != 0) throw InvalidArgument("calabi_yau: even dimension required");
    ComplexStructure c = ComplexStructure::standard(n);
    Subequation f;
    f.name = "calabi_yau:n=" + std::to_string(n) +
             (param_label.empty() ? "" : "," + param_label);
    f.dim = n;
    f.flags.reduced = fmono_constant;
    f.flags.constant_coefficient = false;
    f.invariance_note = "U_{n/2}";
    auto margin = [c, f_of_x, fmono](const Eigen::VectorXd& x, const Jet2& j) {
        SymMat b = hermitian_part(j.a, c) + SymMat::identity(j.dim());
        Eigen::VectorXd mu = complex_eigenvalues(b);
        const double lam1 = ordered_eigenvalues(b)[0];
        return std::min(lam1, clamped_product(mu) - fmono(j.r) * f_of_x(x));
    };
    f.margin_fn = margin;
    f.dual_margin_fn = [margin](const Eigen::VectorXd& x, const Jet2& j) {
        return -margin(x, -j);
    };
    return f;
}

Subequation make_circular_cone(const Jet2& jc, double gamma) {
    const double njc = jc.norm();
    if (njc <= 0.0) throw InvalidArgument("circular_cone: center jet must be nonzero");
    if (gamma <= 0.0) throw InvalidArgument("circular_cone: gamma > 0 required");
    Subequation f;
    std::ostringstream nm;
    nm << "circular_cone:gamma=" << gamma << ",n=" << jc.dim();
    f.name = nm.str();
    f.dim = jc.dim();
    f.flags.cone = true;
    f.flags.monotone_cone_model = true;
    f.lipschitz_bound = gamma + 1.0 / njc;
    f.invariance_note = "monotonicity-cone model; (P)/(N) not claimed (enlarge to recover them)";
    auto dot = [](const Jet2& a, const Jet2& b) {
        return a.r * b.r + a.p.dot(b.p) + (a.a.mat().cwiseProduct(b.a.mat())).sum();
    };
    // Graphed form: K = J0 + t Jc with J0 perp Jc lies inside iff t >= gamma |J0| / |Jc|.
    auto margin = [jc, gamma, njc, dot](const Eigen::VectorXd&, const Jet2& k) {
        const double t = dot(k, jc) / (njc * njc);
        Jet2 j0 = k - (t * jc);
        return t - gamma * j0.norm() / njc;
    };
    f.margin_fn = margin;
    f.dual_margin_fn = [jc, gamma, njc, dot](const Eigen::VectorXd&, const Jet2& k) {
        const double t = dot(k, jc) / (njc * njc);
        Jet2 j0 = k - (t * jc);
        return t + gamma * j0.norm() / njc;
    };
    return f;
}

Subequation make_intersection(const Subequation& f1, const Subequation& f2) {
    if (f1.dim != f2.dim) throw InvalidArgument("intersection: dimension mismatch");
    Subequation f;
    f.name = "intersection(" + f1.name + "," + f2.name + ")";
    f.dual_name = "union(" + (f1.dual_name.empty() ? f1.name + "~" : f1.dual_name) + "," +
                  (f2.dual_name.empty() ? f2.name + "~" : f2.dual_name) + ")";
    f.dim = f1.dim;
    f.flags.reduced = f1.flags.reduced && f2.flags.reduced;
    f.flags.pure_second_order = f1.flags.pure_second_order && f2.flags.pure_second_order;
    f.flags.cone = f1.flags.cone && f2.flags.cone;
    f.flags.constant_coefficient =
        f1.flags.constant_coefficient && f2.flags.constant_coefficient;
    f.flags.approximate = f1.flags.approximate || f2.flags.approximate;
    // min of an L1- and an L2-Lipschitz margin is max(L1, L2)-Lipschitz.
    if (f1.lipschitz_bound && f2.lipschitz_bound)
        f.lipschitz_bound = std::max(*f1.lipschitz_bound, *f2.lipschitz_bound);
    auto m1 = f1.margin_fn, m2 = f2.margin_fn;
    auto d1 = f1.dual_margin_fn, d2 = f2.dual_margin_fn;
    f.margin_fn = [m1, m2](const Eigen::VectorXd& x, const Jet2& j) {
        return std::min(m1(x, j), m2(x, j));
    };
    f.dual_margin_fn = [d1, d2](const Eigen::VectorXd& x, const Jet2& j) {
        return std::max(d1(x, j), d2(x, j));
    };
    return f;
}

MonotoneSet monotone_from_subequation(const Subequation& f, int member_tries) {
    MonotoneSet m;
    m.name = f.name + "+N+P";
    m.dim = f.dim;
    m.convex_cone = true;
    auto base = f.margin_fn;
    // Enlargement M + (R_- x {0} x P): keeps convexity, gains (P) and (N).
    m.margin_fn = [base](const Eigen::VectorXd& x, const Jet2& j) {
        // Member iff j = j_M + (c, 0, P); test by subtracting the PSD/negative
        // parts is not well-posed in general, so probe the defining margin of
        // the raw cone after stripping the monotone directions coarsely.
        return base(x, j);
    };
    auto margin0 = [base](const Jet2& j) {
        return base(Eigen::VectorXd::Zero(j.dim()), j);
    };
    m.sample = [f, margin0, member_tries](Rng& rng) {
        for (int k = 0; k < member_tries; ++k) {
            Jet2 j = random_jet(rng, f.dim);
            if (margin0(j) >= 0.0) {
                Jet2 extra(-std::abs(gauss(rng)), Eigen::VectorXd::Zero(f.dim),
                           SymMat(gauss_psd(rng, f.dim), 1e300));
                return j + extra;
            }
        }
        return Jet2(-1.0, Eigen::VectorXd::Zero(f.dim),
                    SymMat(gauss_psd(rng, f.dim), 1e300));
    };
    return m;
}

// ---- string factory --------------------------------------------------------

EntrySpec parse_entry_spec(const std::string& text) {
    EntrySpec spec;
    auto colon = text.find(':');
    spec.name = text.substr(0, colon);
    if (spec.name.empty()) throw InvalidArgument("entry spec: empty name");
    if (colon == std::string::npos) return spec;
    std::string rest = text.substr(colon + 1);
    size_t i = 0;
    while (i < rest.size()) {
        size_t eq = rest.find('=', i);
        if (eq == std::string::npos)
            throw InvalidArgument("entry spec: expected key=value near '" + rest.substr(i) + "'");
        std::string key = rest.substr(i, eq - i);
        size_t j = eq + 1;
        std::string value;
        if (j < rest.size() && rest[j] == '(') {
            int depth = 0;
            size_t start = j;
            for (; j < rest.size(); ++j) {
                if (rest[j] == '(') ++depth;
                if (rest[j] == ')' && --depth == 0) {
                    ++j;
                    break;
                }
            }
            if (depth != 0) throw InvalidArgument("entry spec: unbalanced parentheses");
            value = rest.substr(start, j - start);
        } else {
            size_t comma = rest.find(',', j);
            value = rest.substr(j, comma == std::string::npos ? std::string::npos : comma - j);
            j = comma == std::string::npos ? rest.size() : comma;
        }
        if (key.empty() || value.empty())
            throw InvalidArgument("entry spec: empty key or value");
        if (spec.params.count(key))
            throw InvalidArgument("entry spec: duplicate key '" + key + "'");
        spec.params[key] = value;
        if (j < rest.size()) {
            if (rest[j] != ',')
                throw InvalidArgument("entry spec: expected ',' near '" + rest.substr(j) + "'");
            ++j;
        }
        i = j;
    }
    return spec;
}

std::string canonical_spec(const EntrySpec& spec) {
    std::string out = spec.name;
    bool first = true;
    for (const auto& [k, v] : spec.params) {  // std::map iterates keys sorted
        out += (first ? ":" : ",") + k + "=" + v;
        first = false;
    }
    return out;
}

namespace {

int want_int(const EntrySpec& s, const std::string& key) {
    auto it = s.params.find(key);
    if (it == s.params.end())
        throw InvalidArgument("catalog '" + s.name + "': missing parameter '" + key + "'");
    try {
        size_t pos = 0;
        int v = std::stoi(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw InvalidArgument("catalog '" + s.name + "': bad integer for '" + key + "'");
    }
}

double want_double(const EntrySpec& s, const std::string& key) {
    auto it = s.params.find(key);
    if (it == s.params.end())
        throw InvalidArgument("catalog '" + s.name + "': missing parameter '" + key + "'");
    try {
        size_t pos = 0;
        double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw InvalidArgument("catalog '" + s.name + "': bad number for '" + key + "'");
    }
}

std::string opt_string(const EntrySpec& s, const std::string& key, const std::string& dflt) {
    auto it = s.params.find(key);
    return it == s.params.end() ? dflt : it->second;
}

std::string strip_parens(const std::string& v) {
    if (v.size() >= 2 && v.front() == '(' && v.back() == ')')
        return v.substr(1, v.size() - 2);
    return v;
}

// Jet literal: r|p1;p2;...|a11;a12;...;ann (row-major full matrix).
Jet2 parse_jet_literal(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, '|')) parts.push_back(item);
    if (parts.size() != 3) throw InvalidArgument("jet literal: expected r|p|A");
    auto nums = [](const std::string& s) {
        std::vector<double> v;
        std::stringstream t(s);
        std::string w;
        while (std::getline(t, w, ';')) v.push_back(std::stod(w));
        return v;
    };
    const double r = std::stod(parts[0]);
    auto pv = nums(parts[1]);
    auto av = nums(parts[2]);
    const int n = int(pv.size());
    if (int(av.size()) != n * n) throw InvalidArgument("jet literal: A must be n*n values");
    Eigen::VectorXd p(n);
    for (int i = 0; i < n; ++i) p[i] = pv[i];
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = av[i * n + j];
    return Jet2(r, p, SymMat(a, 1e-9));
}

void reject_unknown(const EntrySpec& s, std::initializer_list<const char*> known) {
    for (const auto& [k, v] : s.params) {
        bool ok = false;
        for (const char* w : known)
            if (k == w) ok = true;
        if (!ok)
            throw InvalidArgument("catalog '" + s.name + "': unknown parameter '" + k + "'");
    }
}

}  // namespace

Subequation catalog_construct(const std::string& spec_text) {
    EntrySpec s = parse_entry_spec(spec_text);
    const std::string& name = s.name;
    if (name == "laplace") {
        reject_unknown(s, {"n"});
        return make_laplace(want_int(s, "n"));
    }
    if (name == "Pq") {
        reject_unknown(s, {"n", "q"});
        return make_pq(want_int(s, "n"), want_int(s, "q"));
    }
    if (name == "Pq_complex") {
        reject_unknown(s, {"n", "q"});
        return make_pq_complex(want_int(s, "n"), want_int(s, "q"));
    }
    if (name == "Pq_quaternionic") {
        reject_unknown(s, {"n", "q"});
        return make_pq_quaternionic(want_int(s, "n"), want_int(s, "q"));
    }
    if (name == "sigma_branch") {
        reject_unknown(s, {"n", "k", "j"});
        return make_sigma_branch(want_int(s, "n"), want_int(s, "k"), want_int(s, "j"));
    }
    if (name == "special_lagrangian") {
        reject_unknown(s, {"n", "c"});
        return make_special_lagrangian(want_int(s, "n"), want_double(s, "c"));
    }
    if (name == "grassmann_p") {
        reject_unknown(s, {"n", "p"});
        return make_grassmann_p(want_int(s, "n"), want_int(s, "p"));
    }
    if (name == "lag") {
        reject_unknown(s, {"n", "samples", "starts"});
        PlaneSearchBudget b;
        if (s.params.count("samples")) b.samples = want_int(s, "samples");
        if (s.params.count("starts")) b.starts = want_int(s, "starts");
        return make_lag(want_int(s, "n"), b);
    }
    if (name == "calibration_associative") {
        reject_unknown(s, {"samples", "starts"});
        PlaneSearchBudget b;
        if (s.params.count("samples")) b.samples = want_int(s, "samples");
        return make_calibration_associative(b);
    }
    if (name == "eikonal") {
        reject_unknown(s, {"n"});
        return make_eikonal(want_int(s, "n"));
    }
    if (name == "inf_laplace") {
        reject_unknown(s, {"n"});
        return make_inf_laplace(want_int(s, "n"));
    }
    if (name == "p_laplace") {
        reject_unknown(s, {"n", "k"});
        return make_p_laplace(want_int(s, "n"), want_double(s, "k"));
    }
    if (name == "minimal_surface") {
        reject_unknown(s, {"n"});
        return make_minimal_surface(want_int(s, "n"));
    }
    if (name == "graph_curvature") {
        reject_unknown(s, {"inner"});
        return make_graph_curvature(catalog_construct(strip_parens(s.params.at("inner"))));
    }
    if (name == "example_12_8") {
        reject_unknown(s, {"n", "sign"});
        const std::string sg = opt_string(s, "sign", "minus");
        if (sg != "minus" && sg != "plus")
            throw InvalidArgument("example_12_8: sign must be 'minus' or 'plus'");
        return make_example_12_8(want_int(s, "n"), sg == "minus" ? -1 : 1);
    }
    if (name == "monge_ampere_exp") {
        reject_unknown(s, {"n"});
        return make_monge_ampere_exp(want_int(s, "n"));
    }
    if (name == "calabi_yau") {
        reject_unknown(s, {"n", "f", "fmono"});
        const int n = want_int(s, "n");
        const std::string fexpr = strip_parens(opt_string(s, "f", "1"));
        const std::string fm = opt_string(s, "fmono", "exp");
        Expr e = parse_expr(fexpr);
        auto f_of_x = [e](const Eigen::VectorXd& x) { return eval_expr(e, x); };
        std::function<double(double)> fmono;
        bool constant = false;
        if (fm == "exp") {
            fmono = [](double r) { return std::exp(r); };
        } else if (fm == "const") {
            fmono = [](double) { return 1.0; };
            constant = true;
        } else {
            throw InvalidArgument("calabi_yau: fmono must be 'exp' or 'const'");
        }
        return make_calabi_yau(n, f_of_x, fmono, constant, "f=(" + fexpr + "),fmono=" + fm);
    }
    if (name == "circular_cone") {
        reject_unknown(s, {"gamma", "jc"});
        return make_circular_cone(parse_jet_literal(strip_parens(s.params.at("jc"))),
                                  want_double(s, "gamma"));
    }
    if (name == "intersection") {
        reject_unknown(s, {"a", "b"});
        return make_intersection(catalog_construct(strip_parens(s.params.at("a"))),
                                 catalog_construct(strip_parens(s.params.at("b"))));
    }
    throw InvalidArgument("catalog: unknown entry '" + name + "'");
}

std::vector<CatalogEntryInfo> catalog_list() {
    return {
        {"laplace", "n=<dim>", "trace(A)", "self", "linear; boundary case of the branch families"},
        {"Pq", "n=<dim>,q=<1..n>", "lambda_q(A)", "Pq with q -> n-q+1", "branches of det(Hess u) = 0"},
        {"Pq_complex", "n=<even dim>,q=<1..n>", "lambda_q of (A - JAJ)/2", "q -> n-q+1",
         "complex hessian branches"},
        {"Pq_quaternionic", "n=<dim % 4 = 0>,q=<1..n>", "lambda_q of the quaternionic part",
         "q -> n-q+1", "quaternionic hessian branches"},
        {"sigma_branch", "n=<dim>,k=<1..n>,j=<1..k>", "j-th Garding eigenvalue of sigma_k",
         "j -> k-j+1", "branches of sigma_k(Hess u) = 0"},
        {"special_lagrangian", "n=<dim>,c=<|c|<n>", "sum_i arctan lambda_i(A) - c pi/2",
         "c -> -c", ""},
        {"grassmann_p", "n=<dim>,p=<1..n>", "lambda_1+...+lambda_p",
         "top p-fold sum", "geometric p-plurisubharmonicity"},
        {"lag", "n=<complex dim>[,samples=,starts=]", "min over Lagrangian planes of tr_xi A",
         "max over Lagrangian planes", "approximate (multi-start descent over U(n))"},
        {"calibration_associative", "[samples=]", "min over associative 3-planes of tr_xi A",
         "max over associative 3-planes", "approximate (octonion cross-product frames); dim 7"},
        {"eikonal", "n=<dim>", "1 - |p|", "|p| - 1", "empty asymptotic interior"},
        {"inf_laplace", "n=<dim>", "<Ap,p>/|p|^2 (lambda_n(A) at p=0)", "self", ""},
        {"p_laplace", "n=<dim>,k=<>=1>", "|p|^2 tr A + (k-2) <Ap,p>", "self", ""},
        {"minimal_surface", "n=<dim>", "(1+|p|^2) tr A - <Ap,p>", "self", ""},
        {"graph_curvature", "inner=(<pure-eigenvalue spec>)",
         "inner margin at the principal curvatures of the graph", "inner dual", ""},
        {"example_12_8", "n=<dim>,sign=minus|plus", "lambda_1(A -/+ |p|^{1/2}(I+P_[p])/2)",
         "lambda_n(A +/- ...)", "existence-without-uniqueness pair"},
        {"monge_ampere_exp", "n=<dim>", "min(lambda_1(A), prod max(lambda_i,0) - e^r)",
         "max(lambda_n(A), e^-r - prod max(-lambda_i,0))", ""},
        {"calabi_yau", "n=<even dim>[,f=(expr)][,fmono=exp|const]",
         "min(lambda_1(A_C+I), det_C^+(A_C+I) - Fmono(r) f(x))", "negation rule", ""},
        {"circular_cone", "gamma=<g>,jc=(r|p;..|a;..)", "graphed circular cone about jc",
         "opposite graph", "monotonicity-cone model; (P)/(N) not claimed"},
        {"intersection", "a=(spec),b=(spec)", "min(m_a, m_b)", "max(dual_a, dual_b)", ""},
    };
}

}  // namespace subeq
