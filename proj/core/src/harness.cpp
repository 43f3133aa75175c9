#include "subeq/harness.hpp"

#include <chrono>
#include <cmath>

namespace subeq {

AppendixDGrid appendix_d_grid(double c, int delta_nodes, int angular_nodes) {
    AppendixDFields fields = appendix_d_fields();
    const double reach = std::min(fields.band_hi, std::sqrt(2.0 * c) + 0.1);
    if (reach <= fields.band_lo)
        throw InvalidArgument("appendix_d_grid: domain does not meet the tube band");
    Box box;
    box.lo = Eigen::VectorXd::Zero(6);
    box.hi = Eigen::VectorXd::Zero(6);
    const double ang = 0.3;  // fields are angular-invariant; keep the axis short
    box.lo << fields.band_lo, 0.0, 0.0, fields.band_lo, 0.0, 0.0;
    box.hi << reach, ang, ang, reach, ang, ang;
    DomainSpec omega;
    omega.label = "rho<c";
    auto rho = fields.rho;
    omega.rho = [rho, c](const Eigen::VectorXd& x) { return rho(x) - c; };
    std::vector<int> dims = {delta_nodes, angular_nodes, angular_nodes,
                             delta_nodes, angular_nodes, angular_nodes};
    AppendixDGrid out;
    out.grid = Grid::make(box, dims, omega);
    if (out.grid.interior.empty())
        throw InvalidArgument("appendix_d_harness: resolution too coarse for the band "
                              "geometry (no interior nodes)");
    out.region = out.grid.interior;
    for (long b : out.grid.boundary)
        if (rho(out.grid.coords(b)) >= c) out.shell.push_back(b);
    if (out.shell.empty())
        throw InvalidArgument("appendix_d_harness: resolution too coarse (no rho = c shell)");
    return out;
}

AppendixDReport appendix_d_harness(double c, const AppendixDOptions& opts) {
    const auto t_start = std::chrono::steady_clock::now();
    const double pi2_8 = 9.8696044010893586 / 8.0;
    if (!(c > 0.0 && c < pi2_8))
        throw InvalidArgument("appendix_d_harness: need 0 < c < pi^2/8");
    AppendixDFields fields = appendix_d_fields();
    AppendixDReport rep;
    rep.c = c;
    rep.delta_nodes = opts.delta_nodes;
    rep.zero_band = opts.zero_band;

    // (i) + (iii): analytic framed jets at sampled interior points of Omega_c.
    Rng rng(opts.seed);
    rep.signature_samples = opts.signature_samples;
    const double reach = std::min(fields.band_hi, std::sqrt(2.0 * c));
    for (int s = 0; s < opts.signature_samples; ++s) {
        double d1 = 0, d2 = 0;
        do {
            d1 = uniform(rng, fields.band_lo, reach);
            d2 = uniform(rng, fields.band_lo, reach);
        } while (0.5 * (d1 * d1 + d2 * d2) >= c);
        Eigen::VectorXd x(6);
        x << d1, uniform(rng, 0.0, 0.3), uniform(rng, 0.0, 0.3), d2,
            uniform(rng, 0.0, 0.3), uniform(rng, 0.0, 0.3);
        Jet2 framed1 = framed_riemannian_jet(fields.metric, x, fields.u1_jet(x));
        EigenList lam1 = ordered_eigenvalues(framed1.a);
        int neg = 0, zero = 0, pos = 0;
        for (int i = 0; i < 6; ++i) {
            if (lam1[i] < -opts.zero_band)
                ++neg;
            else if (lam1[i] > opts.zero_band)
                ++pos;
            else
                ++zero;
        }
        if (neg == 2 && zero == 3 && pos == 1) ++rep.signature_hits;
        rep.lambda4_residual_u1 = std::max(rep.lambda4_residual_u1, std::abs(lam1[3]));
        // v = -c - u2 has hessian -Hess u2.
        Jet2 u2j = fields.u2_jet(x);
        Jet2 vj(-c - u2j.r, -u2j.p, -u2j.a);
        Jet2 framedv = framed_riemannian_jet(fields.metric, x, vj);
        EigenList lamv = ordered_eigenvalues(framedv.a);
        rep.lambda4_residual_v = std::max(rep.lambda4_residual_v, std::abs(lamv[3]));
    }

    // (ii): ZMP for w = u1 + u2 + c on the band grid.
    AppendixDGrid gg = appendix_d_grid(c, opts.delta_nodes, opts.angular_nodes);
    auto u1 = fields.u1;
    auto u2 = fields.u2;
    GridFunction w = GridFunction::from(
        gg.grid, [&](const Eigen::VectorXd& x) { return u1(x) + u2(x) + c; });
    rep.zmp = zmp_check(w, gg.region, gg.shell);

    // (iv): boundary agreement of the pair (u1, -c - u2) on rho = c, and the
    // interior gap where the band pinches off the gamma x gamma corner.
    const double r = std::sqrt(2.0 * c);
    double worst = 0.0;
    for (int k = 0; k <= 256; ++k) {
        const double alpha = (0.25 + 0.5 * double(k) / 256.0) * 1.5707963267948966;
        const double d1 = r * std::cos(alpha), d2 = r * std::sin(alpha);
        if (d1 < fields.band_lo || d2 < fields.band_lo) continue;
        if (d1 > fields.band_hi || d2 > fields.band_hi) continue;
        Eigen::VectorXd x(6);
        x << d1, 0.1, 0.1, d2, 0.1, 0.1;
        const double vv = -c - u2(x);
        worst = std::max(worst, std::abs(u1(x) - vv));
    }
    rep.boundary_agreement_max = worst;
    Eigen::VectorXd corner(6);
    corner << fields.band_lo, 0.1, 0.1, fields.band_lo, 0.1, 0.1;
    rep.interior_gap_at_band = u1(corner) - (-c - u2(corner));

    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return rep;
}

}  // namespace subeq
