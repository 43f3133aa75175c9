#include "subeq/subequation.hpp"

#include <algorithm>
#include <cmath>

namespace subeq {

Region contains(const Subequation& f, const Eigen::VectorXd& x, const Jet2& j, double tol) {
    if (j.dim() != f.dim)
        throw InvalidArgument("contains: jet dimension mismatch");
    const double m = f.margin(x, j);
    if (m > tol) return Region::Inside;
    if (m < -tol) return Region::Outside;
    return Region::Boundary;
}

Subequation dual(const Subequation& f) {
    Subequation d = f;
    d.name = f.dual_name.empty() ? f.name + "~" : f.dual_name;
    d.dual_name = f.name;
    std::swap(d.margin_fn, d.dual_margin_fn);
    return d;
}

double negation_dual_margin(const Subequation& f, const Eigen::VectorXd& x, const Jet2& j) {
    return -f.margin(x, -j);
}

Subequation translate(const Subequation& f,
                      std::function<Jet2(const Eigen::VectorXd&)> j0,
                      const std::string& suffix) {
    Subequation t = f;
    t.name = f.name + suffix;
    t.dual_name = (f.dual_name.empty() ? f.name + "~" : f.dual_name) + suffix + "~";
    t.flags.cone = false;
    t.flags.constant_coefficient = false;
    auto base_m = f.margin_fn;
    auto base_d = f.dual_margin_fn;
    t.margin_fn = [base_m, j0](const Eigen::VectorXd& x, const Jet2& j) {
        return base_m(x, j - j0(x));
    };
    t.dual_margin_fn = [base_d, j0](const Eigen::VectorXd& x, const Jet2& j) {
        return base_d(x, j + j0(x));
    };
    return t;
}

AffineJetMap AffineJetMap::identity(int n) {
    AffineJetMap m;
    m.dim = n;
    m.g = [n](const Eigen::VectorXd&) { return Eigen::MatrixXd::Identity(n, n); };
    m.h = [n](const Eigen::VectorXd&) { return Eigen::MatrixXd::Identity(n, n); };
    return m;
}

Jet2 AffineJetMap::apply_linear(const Eigen::VectorXd& x, const Jet2& j) const {
    Eigen::MatrixXd gm = g ? g(x) : Eigen::MatrixXd::Identity(dim, dim);
    Eigen::MatrixXd hm = h ? h(x) : Eigen::MatrixXd::Identity(dim, dim);
    SymMat a = j.a.congruence(hm);
    if (l) a = a + l(x, j.p);
    return Jet2(j.r, gm * j.p, a);
}

Jet2 AffineJetMap::apply(const Eigen::VectorXd& x, const Jet2& j) const {
    Jet2 out = apply_linear(x, j);
    if (j0) out = out + j0(x);
    return out;
}

Jet2 AffineJetMap::apply_inverse(const Eigen::VectorXd& x, const Jet2& j) const {
    Jet2 w = j;
    if (j0) w = w - j0(x);
    Eigen::MatrixXd gm = g ? g(x) : Eigen::MatrixXd::Identity(dim, dim);
    Eigen::MatrixXd hm = h ? h(x) : Eigen::MatrixXd::Identity(dim, dim);
    Eigen::MatrixXd gi = gm.inverse();
    Eigen::MatrixXd hi = hm.inverse();
    Eigen::VectorXd p = gi * w.p;
    SymMat a = w.a;
    if (l) a = a - l(x, p);
    return Jet2(w.r, p, a.congruence(hi));
}

Subequation affine_transform(const Subequation& f, const AffineJetMap& phi,
                             const std::string& suffix) {
    if (phi.dim != f.dim)
        throw InvalidArgument("affine_transform: dimension mismatch");
    {   // reject singular g or h at the origin of the chart
        Eigen::VectorXd x0 = Eigen::VectorXd::Zero(f.dim);
        Eigen::MatrixXd gm = phi.g ? phi.g(x0) : Eigen::MatrixXd::Identity(f.dim, f.dim);
        Eigen::MatrixXd hm = phi.h ? phi.h(x0) : Eigen::MatrixXd::Identity(f.dim, f.dim);
        if (std::abs(gm.determinant()) < 1e-14 || std::abs(hm.determinant()) < 1e-14)
            throw InvalidArgument("affine_transform: singular g or h");
    }
    Subequation t = f;
    t.name = f.name + suffix;
    t.dual_name = (f.dual_name.empty() ? f.name + "~" : f.dual_name) + suffix + "~";
    t.flags.cone = false;
    t.flags.constant_coefficient = false;
    auto base_m = f.margin_fn;
    auto base_d = f.dual_margin_fn;
    t.margin_fn = [base_m, phi](const Eigen::VectorXd& x, const Jet2& j) {
        return base_m(x, phi.apply(x, j));
    };
    t.dual_margin_fn = [base_d, phi](const Eigen::VectorXd& x, const Jet2& j) {
        Jet2 w = phi.apply_linear(x, j);
        if (phi.j0) w = w - phi.j0(x);
        return base_d(x, w);
    };
    return t;
}

MonotoneSet pure_p_cone(int n) {
    MonotoneSet m;
    m.name = "pureP";
    m.dim = n;
    m.convex_cone = true;
    m.margin_fn = [](const Eigen::VectorXd&, const Jet2& j) {
        const double lam1 = ordered_eigenvalues(j.a)[0];
        return std::min(lam1, -(std::abs(j.r) + j.p.norm()));
    };
    m.sample = [n](Rng& rng) {
        return Jet2(0.0, Eigen::VectorXd::Zero(n), SymMat(gauss_psd(rng, n), 1e300));
    };
    return m;
}

MonotoneSet negativity_positivity_cone(int n) {
    MonotoneSet m;
    m.name = "N+P";
    m.dim = n;
    m.convex_cone = true;
    m.margin_fn = [](const Eigen::VectorXd&, const Jet2& j) {
        const double lam1 = ordered_eigenvalues(j.a)[0];
        return std::min({lam1, -j.r, -j.p.norm()});
    };
    m.sample = [n](Rng& rng) {
        return Jet2(-std::abs(gauss(rng)), Eigen::VectorXd::Zero(n),
                    SymMat(gauss_psd(rng, n), 1e300));
    };
    return m;
}

Jet2 random_jet(Rng& rng, int n, double scale) {
    return Jet2(scale * gauss(rng), gauss_vector(rng, n, scale),
                SymMat(gauss_symmetric(rng, n, scale), 1e300));
}

std::optional<Jet2> sample_near_boundary(const Subequation& f, const Eigen::VectorXd& x,
                                         Rng& rng, double band, int tries) {
    for (int attempt = 0; attempt < tries; ++attempt) {
        Jet2 base = random_jet(rng, f.dim);
        Jet2 dir = random_jet(rng, f.dim);
        const double nrm = dir.norm();
        if (nrm == 0.0) continue;
        dir = (1.0 / nrm) * dir;
        // Scan for a sign change of the margin along the segment.
        const double tmax = 8.0 * (1.0 + base.norm());
        const int scan = 96;
        double prev_t = -tmax;
        double prev_m = f.margin(x, base + (prev_t * dir));
        bool found = false;
        double lo = 0, hi = 0;
        for (int i = 1; i <= scan; ++i) {
            const double t = -tmax + 2.0 * tmax * double(i) / scan;
            const double m = f.margin(x, base + (t * dir));
            if ((prev_m >= 0.0) != (m >= 0.0)) {
                lo = (prev_m >= 0.0) ? prev_t : t;   // feasible end
                hi = (prev_m >= 0.0) ? t : prev_t;   // infeasible end
                found = true;
                break;
            }
            prev_t = t;
            prev_m = m;
        }
        if (!found) continue;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (f.margin(x, base + (mid * dir)) >= 0.0)
                lo = mid;
            else
                hi = mid;
            if (std::abs(hi - lo) < band * 0.25) break;
        }
        Jet2 j = base + (lo * dir);
        if (f.margin(x, j) >= 0.0) return j;
    }
    return std::nullopt;
}

MonotonicityReport monotonicity_check(const Subequation& f, const MonotoneSet& m,
                                      int samples, std::uint64_t seed) {
    if (m.dim != f.dim)
        throw InvalidArgument("monotonicity_check: dimension mismatch");
    Rng rng(seed);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(f.dim);
    MonotonicityReport rep;
    rep.samples = samples;
    rep.seed = seed;
    rep.min_margin = std::numeric_limits<double>::infinity();
    rep.worst_base = Jet2::zero(f.dim);
    rep.worst_shift = Jet2::zero(f.dim);
    int done = 0;
    while (done < samples) {
        auto base = sample_near_boundary(f, x, rng);
        if (!base) {  // margin never crossed zero along the probes; fall back to a member
            Jet2 j = random_jet(rng, f.dim);
            if (f.margin(x, j) < 0.0) continue;
            base = j;
        }
        Jet2 shift = m.sample ? m.sample(rng) : Jet2::zero(f.dim);
        const double mm = f.margin(x, *base + shift);
        if (mm < rep.min_margin) {
            rep.min_margin = mm;
            rep.worst_base = *base;
            rep.worst_shift = shift;
        }
        ++done;
    }
    rep.pass = rep.min_margin >= -1e-8;
    return rep;
}

CStrictResult c_strict_contains(const Subequation& f, const Eigen::VectorXd& x,
                                const Jet2& j, double c, std::uint64_t seed) {
    if (!f.lipschitz_bound)
        throw InvalidArgument("c_strict_contains: entry carries no lipschitz_bound");
    CStrictResult res;
    const double m = f.margin(x, j);
    if (m / *f.lipschitz_bound >= c) {
        res.certified = true;
        return res;
    }
    Rng rng(seed);
    for (int k = 0; k < 64; ++k) {
        Jet2 dir = random_jet(rng, f.dim);
        const double nrm = dir.norm();
        if (nrm == 0.0) continue;
        Jet2 probe = j + ((c / nrm) * dir);
        if (f.margin(x, probe) < 0.0) {
            res.witness = probe;
            break;
        }
    }
    return res;
}

AsymResult asymptotic_interior_contains(const Subequation& f, const Eigen::VectorXd& x,
                                        const Eigen::VectorXd& p, const SymMat& a,
                                        const AsymOptions& opts) {
    AsymResult res;
    const Jet2 j(opts.lambda, p, a);
    if (f.flags.cone && f.flags.reduced) {
        // For a reduced cone the asymptotic interior is the interior itself.
        const double m = f.margin(x, j);
        res.top_min_margin = m;
        if (m > 0.0) {
            res.verdict = AsymVerdict::Yes;
            res.t0 = 1.0;
        } else {
            res.verdict = AsymVerdict::No;
        }
        return res;
    }
    const double eta = opts.radius_scale * (1.0 + j.norm());
    Rng rng(opts.seed);
    std::vector<Jet2> nbrs;
    nbrs.reserve(opts.neighbors);
    const int n = f.dim;
    const int fiber = 1 + n + n * (n + 1) / 2;
    for (int k = 0; k < opts.neighbors; ++k) {
        // Uniform in the eta-ball of the reduced fiber (r stays frozen).
        Eigen::VectorXd u = uniform_ball(rng, fiber - 1) * eta;
        Eigen::VectorXd dp = u.head(n);
        Eigen::MatrixXd da = Eigen::MatrixXd::Zero(n, n);
        int idx = n;
        for (int i = 0; i < n; ++i)
            for (int jj = i; jj < n; ++jj) {
                const double w = (i == jj) ? u[idx] : u[idx] * 0.5 * std::sqrt(2.0);
                da(i, jj) = w;
                da(jj, i) = w;
                ++idx;
            }
        nbrs.emplace_back(0.0, p + dp, a + SymMat(da, 1e300));
    }
    std::vector<bool> ok;
    double top_min = 0.0;
    for (int k = 0; k <= opts.t_pow_max; ++k) {
        const double t = std::ldexp(1.0, k);
        double mn = std::numeric_limits<double>::infinity();
        for (const Jet2& nb : nbrs) {
            Jet2 scaled(opts.lambda, t * nb.p, t * nb.a);
            mn = std::min(mn, f.margin(x, scaled));
        }
        ok.push_back(mn >= 0.0);
        top_min = mn;
    }
    res.top_min_margin = top_min;
    // Smallest ladder index from which every test passes.
    int first = -1;
    for (int k = int(ok.size()) - 1; k >= 0; --k) {
        if (!ok[k]) break;
        first = k;
    }
    if (first >= 0) {
        res.verdict = AsymVerdict::Yes;
        res.t0 = std::ldexp(1.0, first);
    } else if (top_min < -1e-9) {
        res.verdict = AsymVerdict::No;
    } else {
        res.verdict = AsymVerdict::Undetermined;
    }
    return res;
}

double eigen_boundary_graph(const Subequation& f, const Eigen::VectorXd& mu) {
    const int n = f.dim;
    if (mu.size() != n)
        throw InvalidArgument("eigen_boundary_graph: dimension mismatch");
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    auto marg = [&](double t) {
        Eigen::MatrixXd d = mu.asDiagonal();
        d += t * Eigen::MatrixXd::Identity(n, n);
        return f.margin(x, Jet2::pure_second_order(SymMat(d, 1e300)));
    };
    double hi = 1.0;
    int guard = 0;
    while (marg(hi) < 0.0) {
        hi *= 2.0;
        if (++guard > 80) throw InvalidArgument("eigen_boundary_graph: margin unbounded above?");
    }
    double lo = -1.0;
    guard = 0;
    while (marg(lo) >= 0.0) {
        lo *= 2.0;
        if (++guard > 80)
            throw InvalidArgument("eigen_boundary_graph: margin unbounded below");
    }
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (marg(mid) >= 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

double t_condition_probe(const Subequation& f, int samples, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(f.dim);
    int found = 0, ok = 0;
    while (found < samples) {
        auto b = sample_near_boundary(f, x, rng, 1e-9);
        if (!b) { ++found; continue; }  // conservatively count as probed
        ++found;
        const double rad = 1e-3 * (1.0 + b->norm());
        for (int k = 0; k < 64; ++k) {
            Jet2 dir = random_jet(rng, f.dim);
            const double nrm = dir.norm();
            if (nrm == 0.0) continue;
            if (f.margin(x, *b + ((rad / nrm) * dir)) > 0.0) {
                ++ok;
                break;
            }
        }
    }
    return samples > 0 ? double(ok) / double(samples) : 1.0;
}

}  // namespace subeq
