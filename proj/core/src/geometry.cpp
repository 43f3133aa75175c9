#include "subeq/geometry.hpp"

#include <cmath>
#include <sstream>

namespace subeq {

bool Box::contains(const Eigen::VectorXd& x, double slack) const {
    for (int i = 0; i < x.size(); ++i)
        if (x[i] < lo[i] - slack || x[i] > hi[i] + slack) return false;
    return true;
}

SymMat ChristoffelMap::apply(const Eigen::VectorXd& p) const {
    const int n = dim();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) out += gamma[k] * p[k];
    return SymMat(0.5 * (out + out.transpose()), 1e300);
}

ChristoffelMap christoffel(const MetricChart& metric, const Eigen::VectorXd& x) {
    const int n = metric.n;
    if (metric.euclidean) {
        ChristoffelMap cm;
        cm.gamma.assign(n, Eigen::MatrixXd::Zero(n, n));
        return cm;
    }
    if (metric.analytic_christoffel) return (*metric.analytic_christoffel)(x);
    if (!metric.box.contains(x, -2.0 * metric.h_fd))
        throw InvalidArgument("christoffel: point too close to the chart boundary for "
                              "finite differences");
    const double h = metric.h_fd;
    Eigen::MatrixXd g0 = metric.g(x).mat();
    Eigen::MatrixXd ginv = g0.inverse();
    // dg[l] = d g / d x_l by centered differences.
    std::vector<Eigen::MatrixXd> dg(n);
    for (int l = 0; l < n; ++l) {
        Eigen::VectorXd xp = x, xm = x;
        xp[l] += h;
        xm[l] -= h;
        dg[l] = (metric.g(xp).mat() - metric.g(xm).mat()) / (2.0 * h);
    }
    ChristoffelMap cm;
    cm.gamma.assign(n, Eigen::MatrixXd::Zero(n, n));
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                double s = 0.0;
                for (int l = 0; l < n; ++l)
                    s += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
                cm.gamma[k](i, j) = 0.5 * s;
                cm.gamma[k](j, i) = cm.gamma[k](i, j);
            }
    return cm;
}

Jet2 riemannian_hessian(const MetricChart& metric, const Eigen::VectorXd& x, const Jet2& j) {
    if (metric.euclidean) return j;
    ChristoffelMap cm = christoffel(metric, x);
    return Jet2(j.r, j.p, j.a - cm.apply(j.p));
}

Jet2 frame_transform_jet(const Jet2& j, const Eigen::MatrixXd& h) {
    if (std::abs(h.determinant()) < 1e-14)
        throw InvalidArgument("frame_transform_jet: singular frame");
    return Jet2(j.r, h * j.p, j.a.congruence(h));
}

Eigen::MatrixXd orthonormal_frame(const MetricChart& metric, const Eigen::VectorXd& x) {
    if (metric.euclidean) return Eigen::MatrixXd::Identity(metric.n, metric.n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(metric.g(x).mat());
    if (es.eigenvalues().minCoeff() < 1e-8)
        throw InvalidArgument("orthonormal_frame: metric not positive definite at the point");
    Eigen::VectorXd inv_sqrt = es.eigenvalues().cwiseSqrt().cwiseInverse();
    return es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose();
}

Jet2 framed_riemannian_jet(const MetricChart& metric, const Eigen::VectorXd& x, const Jet2& j) {
    if (metric.euclidean) return j;
    return frame_transform_jet(riemannian_hessian(metric, x, j), orthonormal_frame(metric, x));
}

Jet2 DomainSpec::jet(const Eigen::VectorXd& x) const {
    if (analytic_jet) return (*analytic_jet)(x);
    const int n = int(x.size());
    const double h = h_fd;
    Eigen::VectorXd p(n);
    Eigen::MatrixXd a(n, n);
    const double c0 = rho(x);
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        const double fp = rho(xp), fm = rho(xm);
        p[i] = (fp - fm) / (2.0 * h);
        a(i, i) = (fp - 2.0 * c0 + fm) / (h * h);
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            Eigen::VectorXd xpp = x, xpm = x, xmp = x, xmm = x;
            xpp[i] += h; xpp[j] += h;
            xpm[i] += h; xpm[j] -= h;
            xmp[i] -= h; xmp[j] += h;
            xmm[i] -= h; xmm[j] -= h;
            a(i, j) = (rho(xpp) - rho(xpm) - rho(xmp) + rho(xmm)) / (4.0 * h * h);
            a(j, i) = a(i, j);
        }
    return Jet2(c0, p, SymMat(a, 1e300));
}

BoundaryData second_fundamental_form(const MetricChart& metric, const DomainSpec& domain,
                                     const Eigen::VectorXd& x) {
    const int n = metric.n;
    Jet2 rho_jet = domain.jet(x);
    Eigen::MatrixXd h = orthonormal_frame(metric, x);
    Jet2 framed = frame_transform_jet(riemannian_hessian(metric, x, rho_jet), h);
    const double grad_norm = framed.p.norm();
    if (grad_norm < 1e-6)
        throw InvalidArgument("second_fundamental_form: |grad rho|_g below 1e-6");
    // Normalize the whole jet so the defining function has unit gradient at x.
    Eigen::VectorXd nu = framed.p / grad_norm;  // framed components of the outward normal
    Eigen::MatrixXd hess = framed.a.mat() / grad_norm;
    // Householder complement of nu as the tangent basis.
    Eigen::MatrixXd basis(n, n);
    basis.col(0) = nu;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis.leftCols(1));
    Eigen::MatrixXd q = qr.householderQ();
    Eigen::MatrixXd tangent = q.rightCols(n - 1);
    if ((tangent.transpose() * nu).cwiseAbs().maxCoeff() > 1e-9)
        throw InternalDefect("second_fundamental_form: tangent basis not orthogonal to normal");
    Eigen::MatrixXd ii = tangent.transpose() * hess * tangent;
    BoundaryData bd;
    // Coordinate components: the g-gradient is g^{-1} D rho = h (h D rho).
    bd.normal = h * nu;
    bd.tangent_basis = tangent;
    bd.ii = SymMat(0.5 * (ii + ii.transpose()), 1e300);
    bd.grad_norm = grad_norm;
    return bd;
}

namespace {

AsymResult outer_ladder_asym(const Subequation& f, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& p_red, const SymMat& a_red,
                             const Eigen::VectorXd& rank1_dir, double lambda,
                             const ConvexityOptions& opts) {
    AsymOptions ao = opts.asym;
    ao.lambda = lambda;
    AsymResult last;
    std::vector<AsymResult> results;
    for (int k = 0; k <= opts.t_pow_max; ++k) {
        const double t = std::ldexp(1.0, k);
        Eigen::MatrixXd a_t = a_red.mat() + t * (rank1_dir * rank1_dir.transpose());
        last = asymptotic_interior_contains(f, x, p_red, SymMat(a_t, 1e300), ao);
        results.push_back(last);
        // (P)-monotone in t, so once Yes we are done; keep the smallest t.
        if (last.verdict == AsymVerdict::Yes) {
            last.t0 = t;
            return last;
        }
    }
    return last;  // No or Undetermined at the top of the ladder
}

}  // namespace

std::vector<ConvexityVerdict> boundary_convexity_test(
    const Subequation& f, const MetricChart& metric, const DomainSpec& domain,
    const Eigen::VectorXd& x, const std::vector<double>& lambdas,
    const ConvexityOptions& opts) {
    Jet2 framed = framed_riemannian_jet(metric, x, domain.jet(x));
    std::vector<ConvexityVerdict> out;
    for (double lam : lambdas) {
        AsymResult r = outer_ladder_asym(f, x, framed.p, framed.a, framed.p, lam, opts);
        out.push_back({lam, r.verdict, r.t0});
    }
    return out;
}

AsymResult convexity_blocked(const Subequation& f, const BoundaryData& bd, double lambda,
                             const ConvexityOptions& opts) {
    const int n = int(bd.normal.size());
    Eigen::VectorXd nu = Eigen::VectorXd::Zero(n);
    nu[0] = 1.0;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    a.bottomRightCorner(n - 1, n - 1) = bd.ii.mat();
    return outer_ladder_asym(f, Eigen::VectorXd::Zero(n), nu, SymMat(a, 1e300), nu, lambda,
                             opts);
}

BarrierResult make_barrier(const Subequation& f, const MetricChart& metric,
                           const DomainSpec& domain, const Eigen::VectorXd& x0,
                           double lambda, const BarrierOptions& opts) {
    BarrierResult res;
    res.lambda = lambda;
    if (!f.lipschitz_bound) {
        res.diagnostics = "entry carries no lipschitz_bound; c-strict certificates unavailable";
        return res;
    }
    // Pre-test: strict convexity at some lambda' > lambda.
    const double lambda_prime = lambda + opts.lambda_prime_offset;
    auto conv = boundary_convexity_test(f, metric, domain, x0, {lambda_prime});
    if (conv.at(0).verdict != AsymVerdict::Yes) {
        res.diagnostics = "boundary not strictly convex at lambda' = " +
                          std::to_string(lambda_prime);
        return res;
    }
    auto beta_jet = [&](const Eigen::VectorXd& x, double c_big, double eps) {
        Jet2 rj = domain.jet(x);
        const int n = metric.n;
        const double val = lambda + c_big * (rj.r - 0.5 * eps * (x - x0).squaredNorm());
        Eigen::VectorXd p = c_big * (rj.p - eps * (x - x0));
        Eigen::MatrixXd a = c_big * (rj.a.mat() - eps * Eigen::MatrixXd::Identity(n, n));
        return Jet2(val, p, SymMat(a, 1e300));
    };
    for (int ke = 0; ke < opts.eps_pows; ++ke) {
        const double eps = 1e-1 * std::ldexp(1.0, -ke);
        for (int kr = 0; kr < opts.eps_pows; ++kr) {
            const double r0 = 1e-1 * std::ldexp(1.0, -kr);
            for (int kc = 0; kc < opts.c_pows; ++kc) {
                const double c_big = std::ldexp(1.0, kc);
                bool ok = true;
                Rng rng(opts.seed);
                for (int s = 0; s < opts.samples && ok; ++s) {
                    Eigen::VectorXd x = x0 + r0 * uniform_ball(rng, metric.n);
                    if (!metric.box.contains(x)) continue;
                    for (double cc : {c_big, 2.0 * c_big}) {
                        Jet2 jet = framed_riemannian_jet(metric, x, beta_jet(x, cc, eps));
                        auto cs = c_strict_contains(f, x, jet, opts.strictness);
                        if (!cs.certified) {
                            ok = false;
                            break;
                        }
                    }
                }
                if (ok) {
                    res.found = true;
                    res.c_big = c_big;
                    res.eps = eps;
                    res.r0 = r0;
                    return res;
                }
            }
        }
    }
    res.diagnostics = "search exhausted over eps, r0, C ladders";
    return res;
}

namespace {

constexpr double kBandLo = 1e-2;
constexpr double kPiHalf = 1.5707963267948966;

void check_tube_band(double delta) {
    if (delta < kBandLo || delta > kPiHalf - kBandLo)
        throw InvalidArgument("s3 tube chart: delta outside [1e-2, pi/2 - 1e-2]");
}

ChristoffelMap s3_tube_gamma_block(double delta) {
    // Nonzero symbols of diag(1, cos^2 d, sin^2 d):
    //   G^d_tt = cos d sin d,  G^d_pp = -cos d sin d,
    //   G^t_dt = -tan d,       G^p_dp = cot d.
    ChristoffelMap cm;
    cm.gamma.assign(3, Eigen::MatrixXd::Zero(3, 3));
    const double cs = std::cos(delta) * std::sin(delta);
    cm.gamma[0](1, 1) = cs;
    cm.gamma[0](2, 2) = -cs;
    cm.gamma[1](0, 1) = cm.gamma[1](1, 0) = -std::tan(delta);
    cm.gamma[2](0, 2) = cm.gamma[2](2, 0) = 1.0 / std::tan(delta);
    return cm;
}

MetricChart s3_tube_chart() {
    MetricChart m;
    m.name = "s3_tube";
    m.n = 3;
    m.box.lo = Eigen::VectorXd::Zero(3);
    m.box.hi = Eigen::VectorXd::Zero(3);
    m.box.lo << kBandLo, 0.0, 0.0;
    m.box.hi << kPiHalf - kBandLo, 6.2831853071795862, 6.2831853071795862;
    m.g = [](const Eigen::VectorXd& x) {
        check_tube_band(x[0]);
        Eigen::Vector3d d(1.0, std::cos(x[0]) * std::cos(x[0]),
                          std::sin(x[0]) * std::sin(x[0]));
        return SymMat(Eigen::MatrixXd(d.asDiagonal()), 1e300);
    };
    m.analytic_christoffel = [](const Eigen::VectorXd& x) {
        check_tube_band(x[0]);
        return s3_tube_gamma_block(x[0]);
    };
    return m;
}

MetricChart s3xs3_tube_chart() {
    MetricChart m;
    m.name = "s3xs3_tube";
    m.n = 6;
    m.box.lo = Eigen::VectorXd::Zero(6);
    m.box.hi = Eigen::VectorXd::Zero(6);
    m.box.lo << kBandLo, 0.0, 0.0, kBandLo, 0.0, 0.0;
    m.box.hi << kPiHalf - kBandLo, 6.2831853071795862, 6.2831853071795862,
        kPiHalf - kBandLo, 6.2831853071795862, 6.2831853071795862;
    m.g = [](const Eigen::VectorXd& x) {
        check_tube_band(x[0]);
        check_tube_band(x[3]);
        Eigen::VectorXd d(6);
        d << 1.0, std::cos(x[0]) * std::cos(x[0]), std::sin(x[0]) * std::sin(x[0]), 1.0,
            std::cos(x[3]) * std::cos(x[3]), std::sin(x[3]) * std::sin(x[3]);
        return SymMat(Eigen::MatrixXd(d.asDiagonal()), 1e300);
    };
    m.analytic_christoffel = [](const Eigen::VectorXd& x) {
        ChristoffelMap b1 = s3_tube_gamma_block(x[0]);
        ChristoffelMap b2 = s3_tube_gamma_block(x[3]);
        ChristoffelMap cm;
        cm.gamma.assign(6, Eigen::MatrixXd::Zero(6, 6));
        for (int k = 0; k < 3; ++k) {
            cm.gamma[k].topLeftCorner(3, 3) = b1.gamma[k];
            cm.gamma[3 + k].bottomRightCorner(3, 3) = b2.gamma[k];
        }
        return cm;
    };
    return m;
}

}  // namespace

MetricChart builtin_metric(const std::string& name) {
    if (name.rfind("euclidean", 0) == 0) {
        int n = 0;
        auto colon = name.find(":n=");
        auto paren = name.find("(");
        if (colon != std::string::npos) {
            n = std::stoi(name.substr(colon + 3));
        } else if (paren != std::string::npos) {
            n = std::stoi(name.substr(paren + 1));
        } else {
            throw InvalidArgument("builtin_metric: euclidean needs a dimension, e.g. "
                                  "euclidean:n=3");
        }
        if (n < 1 || n > SymMat::kMaxDim)
            throw InvalidArgument("builtin_metric: dimension out of range");
        MetricChart m;
        m.name = "euclidean:n=" + std::to_string(n);
        m.n = n;
        m.euclidean = true;
        m.box.lo = Eigen::VectorXd::Constant(n, -1e9);
        m.box.hi = Eigen::VectorXd::Constant(n, 1e9);
        m.g = [n](const Eigen::VectorXd&) { return SymMat::identity(n); };
        m.analytic_christoffel = [n](const Eigen::VectorXd&) {
            ChristoffelMap cm;
            cm.gamma.assign(n, Eigen::MatrixXd::Zero(n, n));
            return cm;
        };
        return m;
    }
    if (name == "s3_tube") return s3_tube_chart();
    if (name == "s3xs3_tube") return s3xs3_tube_chart();
    throw InvalidArgument("builtin_metric: unknown metric '" + name + "'");
}

AppendixDFields appendix_d_fields() {
    AppendixDFields f;
    f.metric = s3xs3_tube_chart();
    f.band_lo = kBandLo;
    f.band_hi = kPiHalf - kBandLo;
    f.delta1 = [](const Eigen::VectorXd& x) { check_tube_band(x[0]); return x[0]; };
    f.delta2 = [](const Eigen::VectorXd& x) { check_tube_band(x[3]); return x[3]; };
    f.u1 = [](const Eigen::VectorXd& x) { check_tube_band(x[0]); return -0.5 * x[0] * x[0]; };
    f.u2 = [](const Eigen::VectorXd& x) { check_tube_band(x[3]); return -0.5 * x[3] * x[3]; };
    f.rho = [](const Eigen::VectorXd& x) {
        check_tube_band(x[0]);
        check_tube_band(x[3]);
        return 0.5 * (x[0] * x[0] + x[3] * x[3]);
    };
    f.u1_jet = [](const Eigen::VectorXd& x) {
        check_tube_band(x[0]);
        Eigen::VectorXd p = Eigen::VectorXd::Zero(6);
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(6, 6);
        p[0] = -x[0];
        a(0, 0) = -1.0;
        return Jet2(-0.5 * x[0] * x[0], p, SymMat(a, 1e300));
    };
    f.u2_jet = [](const Eigen::VectorXd& x) {
        check_tube_band(x[3]);
        Eigen::VectorXd p = Eigen::VectorXd::Zero(6);
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(6, 6);
        p[3] = -x[3];
        a(3, 3) = -1.0;
        return Jet2(-0.5 * x[3] * x[3], p, SymMat(a, 1e300));
    };
    f.rho_jet = [](const Eigen::VectorXd& x) {
        check_tube_band(x[0]);
        check_tube_band(x[3]);
        Eigen::VectorXd p = Eigen::VectorXd::Zero(6);
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(6, 6);
        p[0] = x[0];
        p[3] = x[3];
        a(0, 0) = 1.0;
        a(3, 3) = 1.0;
        return Jet2(0.5 * (x[0] * x[0] + x[3] * x[3]), p, SymMat(a, 1e300));
    };
    return f;
}

std::vector<Eigen::VectorXd> sample_boundary_points(const DomainSpec& domain, const Box& box,
                                                    int count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Eigen::VectorXd> points;
    const int n = box.dim();
    int guard = 0;
    while (int(points.size()) < count && ++guard < 100000) {
        Eigen::VectorXd a(n), b(n);
        for (int i = 0; i < n; ++i) {
            a[i] = uniform(rng, box.lo[i], box.hi[i]);
            b[i] = uniform(rng, box.lo[i], box.hi[i]);
        }
        double ra = domain(a), rb = domain(b);
        if ((ra < 0.0) == (rb < 0.0)) continue;
        if (ra >= 0.0) std::swap(a, b);
        for (int it = 0; it < 200; ++it) {
            Eigen::VectorXd mid = 0.5 * (a + b);
            if (domain(mid) < 0.0)
                a = mid;
            else
                b = mid;
            if ((a - b).norm() < 1e-12) break;
        }
        points.push_back(b);
    }
    if (int(points.size()) < count)
        throw InvalidArgument("sample_boundary_points: could not find enough boundary "
                              "crossings in the box");
    return points;
}

}  // namespace subeq
