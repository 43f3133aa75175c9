#include "subeq/solver.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

namespace subeq {

namespace {

struct NodeGeometry {
    Eigen::VectorXd x;
    Eigen::MatrixXd frame;            // g^{-1/2}, identity on euclidean charts
    std::optional<ChristoffelMap> gamma;
};

NodeGeometry node_geometry(const MetricChart& metric, const Grid& grid, long node) {
    NodeGeometry ng;
    ng.x = grid.coords(node);
    if (metric.euclidean) {
        ng.frame = Eigen::MatrixXd::Identity(metric.n, metric.n);
    } else {
        ng.frame = orthonormal_frame(metric, ng.x);
        ng.gamma = christoffel(metric, ng.x);
    }
    return ng;
}

/// Stencil pieces of the coordinate hessian at a node, split into the part
/// independent of the center value and the (negative diagonal) coefficient of
/// the center value. A(t) = a0 - t * diag(2/h_i^2); p is t-independent.
struct NodalStencil {
    Eigen::VectorXd p;
    Eigen::MatrixXd a0;
    Eigen::VectorXd diag_coeff;  // 2/h_i^2

    void load(const GridFunction& u, const Grid& g, long node) {
        const int n = g.dim();
        p.resize(n);
        a0.resize(n, n);
        diag_coeff.resize(n);
        for (int i = 0; i < n; ++i) {
            const double up = u[node + g.stride(i)];
            const double um = u[node - g.stride(i)];
            p[i] = (up - um) / (2.0 * g.h[i]);
            a0(i, i) = (up + um) / (g.h[i] * g.h[i]);
            diag_coeff[i] = 2.0 / (g.h[i] * g.h[i]);
        }
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const long si = g.stride(i), sj = g.stride(j);
                const double cross = (u[node + si + sj] + u[node - si - sj] -
                                      u[node + si - sj] - u[node - si + sj]) /
                                     (4.0 * g.h[i] * g.h[j]);
                a0(i, j) = cross;
                a0(j, i) = cross;
            }
    }
};

/// Margin of the nodal jet as a function of the center value. Holds a
/// scratch jet so evaluations stay allocation-free.
struct NodalMargin {
    const Subequation* f = nullptr;
    Eigen::VectorXd x;
    Eigen::MatrixXd base;        // framed (a0 - Gamma(p))
    Eigen::MatrixXd diag_framed; // framed diag(2/h^2)
    Jet2 scratch = Jet2::zero(1);

    void assemble(const NodalStencil& st, const NodeGeometry& ng) {
        Eigen::MatrixXd a = st.a0;
        if (ng.gamma) a -= ng.gamma->apply(st.p).mat();
        base = ng.frame * a * ng.frame.transpose();
        base = 0.5 * (base + base.transpose()).eval();
        diag_framed = ng.frame * st.diag_coeff.asDiagonal() * ng.frame.transpose();
        diag_framed = 0.5 * (diag_framed + diag_framed.transpose()).eval();
        x = ng.x;
        scratch = Jet2(0.0, ng.frame * st.p, SymMat::trusted(Eigen::MatrixXd(base)));
    }

    double operator()(double t) {
        scratch.r = t;
        Eigen::MatrixXd& a = scratch.a.mut_trusted();
        a = base;
        a.noalias() -= t * diag_framed;
        return f->margin(x, scratch);
    }
};

/// Largest t with margin(t) >= 0, margins nonincreasing in t. Secant with the
/// Illinois safeguard on a certified bracket; flat-at-zero stretches resolve
/// to the right end by predicate bisection.
double largest_feasible(NodalMargin& m, double t0, const SolveConfig& cfg, double tau,
                        double warm_step) {
    const double cap = cfg.value_cap;
    auto certify = [&]() {
        const double mlo = m(-cap), mhi = m(cap);
        if (!(mlo > mhi))
            throw FlatUpdateError("nodal margin does not depend on the center value");
        if (mhi >= 0.0) throw ValueCapError("nodal root above the value cap");
        if (mlo <= 0.0) throw ValueCapError("nodal root below the negative value cap");
    };
    double lo, hi, flo, fhi;
    double f0 = m(t0);
    double step = std::max(warm_step, 256.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(t0)));
    if (f0 >= 0.0) {
        lo = t0;
        flo = f0;
        hi = t0 + step;
        fhi = m(hi);
        int guard = 0;
        while (fhi >= 0.0) {
            lo = hi;
            flo = fhi;
            step *= cfg.bracket_growth;
            hi = t0 + step;
            if (hi > cap) { certify(); hi = cap; }
            fhi = m(hi);
            if (++guard > 200) throw ValueCapError("nodal bracket expansion failed");
        }
    } else {
        hi = t0;
        fhi = f0;
        lo = t0 - step;
        flo = m(lo);
        int guard = 0;
        while (flo < 0.0) {
            hi = lo;
            fhi = flo;
            step *= cfg.bracket_growth;
            lo = t0 - step;
            if (lo < -cap) { certify(); lo = -cap; }
            flo = m(lo);
            if (++guard > 200) throw ValueCapError("nodal bracket expansion failed");
        }
    }
    bool last_was_lo = false;
    double fhi_scaled = fhi;
    // The bracket cannot shrink below the floating-point resolution at t.
    auto width_floor = [&]() {
        return std::max(tau, 8.0 * std::numeric_limits<double>::epsilon() *
                                 (1.0 + std::abs(lo) + std::abs(hi)));
    };
    for (int it = 0; it < 500 && hi - lo > width_floor(); ++it) {
        double t;
        if (flo == 0.0) {
            // Flat-at-zero: the largest root is the right edge of {margin >= 0}.
            t = 0.5 * (lo + hi);
        } else {
            t = (lo * fhi_scaled - hi * flo) / (fhi_scaled - flo);
            const double guard = 0.01 * (hi - lo);
            t = std::min(std::max(t, lo + guard), hi - guard);
        }
        if (!(t > lo && t < hi)) t = 0.5 * (lo + hi);
        if (!(t > lo && t < hi)) break;  // bracket resolved to adjacent doubles
        const double ft = m(t);
        if (ft == 0.0) {
            // Exact hit: accept immediately if nothing feasible remains to the right.
            if (m(t + std::max(tau, 1e-15 * (1.0 + std::abs(t)))) < 0.0) return t;
            lo = t;
            flo = 0.0;
            continue;
        }
        if (ft > 0.0) {
            lo = t;
            flo = ft;
            if (last_was_lo) fhi_scaled *= 0.5;  // Illinois: shrink the stagnant side
            last_was_lo = true;
        } else {
            hi = t;
            fhi = ft;
            fhi_scaled = ft;
            last_was_lo = false;
        }
    }
    return lo;
}

}  // namespace

Jet2 discrete_jet(const GridFunction& u, const MetricChart& metric, long node) {
    const Grid& g = *u.grid;
    if (g.mask[node] != NodeClass::Interior)
        throw InvalidArgument("discrete_jet: node is not interior");
    NodalStencil st;
    st.load(u, g, node);
    Eigen::MatrixXd a = st.a0;
    for (int i = 0; i < g.dim(); ++i) a(i, i) -= st.diag_coeff[i] * u[node];
    Jet2 coord(u[node], st.p, SymMat(0.5 * (a + a.transpose()), 1e300));
    return framed_riemannian_jet(metric, g.coords(node), coord);
}

SubharmonicReport f_subharmonic_test(const GridFunction& u, const Subequation& f,
                                     const MetricChart& metric, double tol) {
    const Grid& g = *u.grid;
    SubharmonicReport rep;
    rep.min_margin = std::numeric_limits<double>::infinity();
    for (long node : g.interior) {
        Jet2 jet = discrete_jet(u, metric, node);
        const double m = f.margin(g.coords(node), jet);
        if (m < rep.min_margin) {
            rep.min_margin = m;
            rep.witness_node = node;
            rep.witness_coords = g.coords(node);
        }
    }
    if (g.interior.empty()) rep.min_margin = 0.0;
    rep.pass = rep.min_margin >= -tol;
    return rep;
}

std::pair<GridFunction, SolveReport> perron_solve(const Subequation& f,
                                                  const MetricChart& metric, const Grid& grid,
                                                  const GridFunction& phi,
                                                  const SolveConfig& cfg,
                                                  const GridFunction* initial) {
    const auto t_start = std::chrono::steady_clock::now();
    if (f.dim != grid.dim())
        throw InvalidArgument("perron_solve: subequation and grid dimensions differ");
    if (grid.interior.empty())
        throw InvalidArgument("perron_solve: grid has no interior nodes");

    GridFunction u = GridFunction::zeros(grid);
    double phi_min = std::numeric_limits<double>::infinity();
    for (long b : grid.boundary) phi_min = std::min(phi_min, phi[b]);
    for (long i = 0; i < grid.size(); ++i)
        u[i] = (initial != nullptr) ? (*initial)[i] : phi_min - 1.0;
    for (long b : grid.boundary) u[b] = phi[b];

    const long m = long(grid.interior.size());
    std::vector<NodeGeometry> geom(m);
    for (long k = 0; k < m; ++k) geom[k] = node_geometry(metric, grid, grid.interior[k]);

    // Nodal root tolerance tied to the residual target through the margin's
    // sensitivity to the center value (about sum 2/h_i^2 in the framed jet).
    double sens = 0.0;
    for (int i = 0; i < grid.dim(); ++i) sens += 2.0 / (grid.h[i] * grid.h[i]);
    const double tau = std::min(cfg.tol_iter * 1e-2, 0.1 * cfg.tol_residual / sens);

    std::vector<double> warm(m, 0.0);
    std::vector<char> certified(m, 0);

    SolveReport rep;
    Eigen::VectorXd jacobi_buf;
    auto update_node = [&](long k, const GridFunction& src) {
        const long node = grid.interior[k];
        NodalStencil st;
        st.load(src, grid, node);
        NodalMargin nm;
        nm.f = &f;
        nm.assemble(st, geom[k]);
        if (!certified[k]) {
            const double mlo = nm(-cfg.value_cap), mhi = nm(cfg.value_cap);
            if (!(mlo > mhi))
                throw FlatUpdateError(
                    "perron_solve: margin ignores the center value at node " +
                    std::to_string(node) + " (" + f.name + ")");
            if (mhi >= 0.0 || mlo <= 0.0)
                throw ValueCapError("perron_solve: nodal root outside the value cap");
            certified[k] = 1;
        }
        if (cfg.debug_check_monotone) {
            const double span = 1.0 + std::abs(src[node]);
            double prev = std::numeric_limits<double>::infinity();
            for (int q = 0; q < 8; ++q) {
                const double t = src[node] + span * (double(q) / 3.5 - 1.0);
                const double mq = nm(t);
                if (mq > prev + 1e-9 * (1.0 + std::abs(prev)))
                    throw InternalDefect(
                        "perron_solve: nodal margin increased with the center value");
                prev = mq;
            }
        }
        const double t_new =
            largest_feasible(nm, src[node], cfg, tau, 8.0 * warm[k]);
        warm[k] = std::abs(t_new - src[node]);
        return t_new;
    };

    auto residual_pass = [&]() {
        double worst = 0.0;
        long worst_node = -1;
        for (long k = 0; k < m; ++k) {
            const long node = grid.interior[k];
            NodalStencil st;
            st.load(u, grid, node);
            NodalMargin nm;
            nm.f = &f;
            nm.assemble(st, geom[k]);
            const double r = std::abs(nm(u[node]));
            if (r > worst) {
                worst = r;
                worst_node = node;
            }
        }
        rep.max_margin_residual = worst;
        rep.witness_node = worst_node;
        if (worst_node >= 0) rep.witness_coords = grid.coords(worst_node);
        return worst;
    };

    for (long sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
        double max_update = 0.0;
        if (cfg.mode == SweepMode::GaussSeidel) {
            for (long k = 0; k < m; ++k) {
                const long node = grid.interior[k];
                const double t_new = update_node(k, u);
                max_update = std::max(max_update, std::abs(t_new - u[node]));
                u[node] = t_new;
            }
        } else {
            jacobi_buf.resize(m);
            const int nthreads = std::max(1, cfg.threads);
            if (nthreads == 1) {
                for (long k = 0; k < m; ++k) jacobi_buf[k] = update_node(k, u);
            } else {
                std::vector<std::thread> pool;
                std::atomic<long> next{0};
                for (int t = 0; t < nthreads; ++t)
                    pool.emplace_back([&]() {
                        long k;
                        while ((k = next.fetch_add(1)) < m) jacobi_buf[k] = update_node(k, u);
                    });
                for (auto& th : pool) th.join();
            }
            for (long k = 0; k < m; ++k) {
                const long node = grid.interior[k];
                max_update = std::max(max_update, std::abs(jacobi_buf[k] - u[node]));
                u[node] = jacobi_buf[k];
            }
        }
        rep.sweeps = sweep;
        rep.max_update = max_update;
        if (max_update <= cfg.tol_iter) {
            if (residual_pass() <= cfg.tol_residual) {
                rep.converged = true;
                break;
            }
        }
    }
    if (!rep.converged) residual_pass();
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return {std::move(u), rep};
}

ZmpReport zmp_check(const GridFunction& w, const std::vector<long>& region,
                    const std::vector<long>& boundary) {
    ZmpReport rep;
    rep.boundary_max = -std::numeric_limits<double>::infinity();
    for (long b : boundary) rep.boundary_max = std::max(rep.boundary_max, w[b]);
    rep.applicable = rep.boundary_max <= 0.0;
    rep.interior_max = -std::numeric_limits<double>::infinity();
    for (long i : region) {
        if (w[i] > rep.interior_max) {
            rep.interior_max = w[i];
            rep.witness_node = i;
        }
    }
    if (rep.witness_node >= 0) rep.witness_coords = w.grid->coords(rep.witness_node);
    if (rep.applicable && rep.interior_max > 1e-9) {
        rep.violation = true;
        rep.magnitude = rep.interior_max;
    }
    return rep;
}

ZmpReport zmp_check(const GridFunction& w) {
    return zmp_check(w, w.grid->interior, w.grid->boundary);
}

ComparisonReport comparison_check(const GridFunction& u, const GridFunction& v,
                                  const Subequation& f, const MetricChart& metric,
                                  double tol) {
    ComparisonReport rep;
    rep.u_subharmonic = f_subharmonic_test(u, f, metric, tol);
    rep.v_dual_subharmonic = f_subharmonic_test(v, dual(f), metric, tol);
    GridFunction sum = u;
    sum.values += v.values;
    rep.zmp = zmp_check(sum);
    rep.comparison_holds = rep.u_subharmonic.pass && rep.v_dual_subharmonic.pass &&
                           rep.zmp.applicable && !rep.zmp.violation;
    return rep;
}

SumsProbeReport sums_probe(const GridFunction& u, const GridFunction& v,
                           const std::vector<long>& region,
                           const std::vector<long>& boundary,
                           const std::vector<double>& epsilons) {
    SumsProbeReport rep;
    GridFunction w = u;
    w.values += v.values;
    ZmpReport zmp = zmp_check(w, region, boundary);
    rep.m0 = zmp.interior_max;
    rep.applicable = zmp.applicable && rep.m0 > 0.0;
    if (!rep.applicable) return rep;

    std::vector<long> nodes = region;
    nodes.insert(nodes.end(), boundary.begin(), boundary.end());
    const long npairs = long(nodes.size()) * long(nodes.size());
    if (npairs > 100000000L)
        throw InvalidArgument("sums_probe: pair count above 1e8 (desk scale only)");
    const Grid& g = *u.grid;
    std::vector<Eigen::VectorXd> pts;
    pts.reserve(nodes.size());
    for (long n : nodes) pts.push_back(g.coords(n));

    for (double eps : epsilons) {
        SumsProbeStep step;
        step.epsilon = eps;
        step.m_eps = -std::numeric_limits<double>::infinity();
        long bx = 0, by = 0;
        for (size_t i = 0; i < nodes.size(); ++i) {
            const double ui = u[nodes[i]];
            for (size_t j = 0; j < nodes.size(); ++j) {
                const double val =
                    ui + v[nodes[j]] - (pts[i] - pts[j]).squaredNorm() / (2.0 * eps);
                if (val > step.m_eps) {
                    step.m_eps = val;
                    bx = long(i);
                    by = long(j);
                }
            }
        }
        step.x = pts[bx];
        step.y = pts[by];
        step.p_eps = (step.x - step.y) / eps;
        step.penalty = (step.x - step.y).squaredNorm() / eps;
        rep.steps.push_back(step);
    }
    rep.monotone = true;
    for (size_t i = 1; i < rep.steps.size(); ++i)
        if (rep.steps[i].m_eps > rep.steps[i - 1].m_eps + 1e-12) rep.monotone = false;
    if (!rep.steps.empty())
        rep.penalty_vanishes = rep.steps.back().penalty <= rep.steps.front().penalty + 1e-12;
    return rep;
}

}  // namespace subeq
