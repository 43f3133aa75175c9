#include "subeq/invariants.hpp"

#include <cmath>

namespace subeq {

namespace {

bool is_pure_eigenvalue_entry(const Subequation& f) {
    return f.flags.pure_second_order;
}

}  // namespace

std::vector<InvariantResult> subequation_invariant_suite(const Subequation& f, int samples,
                                                         std::uint64_t seed) {
    std::vector<InvariantResult> out;
    Rng rng(seed);
    const Eigen::VectorXd x = Eigen::VectorXd::Zero(f.dim);
    const bool expensive = f.flags.approximate;
    const int n_mono = expensive ? std::min(samples, 100) : samples;

    if (!f.flags.monotone_cone_model) {
        InvariantResult p{"(P) margin monotone in A", false, true, 0.0, ""};
        double worst = std::numeric_limits<double>::infinity();
        for (int s = 0; s < n_mono; ++s) {
            Jet2 j = random_jet(rng, f.dim);
            SymMat psd(gauss_psd(rng, f.dim), 1e300);
            Jet2 shifted(j.r, j.p, j.a + psd);
            worst = std::min(worst, f.margin(x, shifted) - f.margin(x, j));
        }
        p.worst = worst;
        p.pass = worst >= -1e-9;
        out.push_back(p);

        InvariantResult nn{"(N) margin nonincreasing in r", false, true, 0.0, ""};
        worst = std::numeric_limits<double>::infinity();
        for (int s = 0; s < n_mono; ++s) {
            Jet2 j = random_jet(rng, f.dim);
            const double drop = std::abs(gauss(rng));
            Jet2 lower(j.r - drop, j.p, j.a);
            worst = std::min(worst, f.margin(x, lower) - f.margin(x, j));
        }
        nn.worst = worst;
        nn.pass = worst >= -1e-9;
        out.push_back(nn);
    }

    {
        InvariantResult d{"dual coherence: sign of hand dual vs -m(-J)", false, true, 0.0, ""};
        int bad = 0, used = 0;
        const int n_dual = expensive ? std::min(samples, 50) : samples;
        for (int s = 0; s < n_dual; ++s) {
            Jet2 j = random_jet(rng, f.dim);
            const double neg = negation_dual_margin(f, x, j);
            if (std::abs(f.margin(x, -j)) <= 1e-8) continue;
            ++used;
            const double hand = f.dual_margin(x, j);
            if ((hand >= 0.0) != (neg >= 0.0)) ++bad;
        }
        d.worst = double(bad);
        d.note = std::to_string(used) + " generic jets";
        d.pass = bad == 0;
        out.push_back(d);
    }

    {
        InvariantResult dd{"double dual restores the margin", false, true, 0.0, ""};
        Subequation d2 = dual(dual(f));
        double worst = 0.0;
        const int n_dd = expensive ? std::min(samples, 20) : std::min(samples, 1000);
        for (int s = 0; s < n_dd; ++s) {
            Jet2 j = random_jet(rng, f.dim);
            worst = std::max(worst, std::abs(d2.margin(x, j) - f.margin(x, j)));
        }
        dd.worst = worst;
        dd.pass = worst == 0.0;  // bitwise, by construction
        out.push_back(dd);
    }

    if (f.flags.cone) {
        InvariantResult c{"cone: sign of margin invariant under t J", false, true, 0.0, ""};
        int bad = 0;
        const int n_cone = expensive ? std::min(samples, 50) : samples;
        for (int s = 0; s < n_cone; ++s) {
            Jet2 j = random_jet(rng, f.dim);
            const double m = f.margin(x, j);
            if (std::abs(m) <= 1e-10) continue;
            const double t = std::exp(uniform(rng, -3.0, 3.0));
            const double mt = f.margin(x, t * j);
            if (std::abs(mt) <= 1e-12) continue;  // scaled onto the boundary band
            if ((m > 0.0) != (mt > 0.0)) ++bad;
        }
        c.worst = double(bad);
        c.pass = bad == 0;
        out.push_back(c);
    }

    if (is_pure_eigenvalue_entry(f) && !f.flags.monotone_cone_model) {
        InvariantResult sa{"strict approximation: margin(J + 2eI) - margin(J) >= 2e c_F",
                           false, true, 0.0, ""};
        double worst = std::numeric_limits<double>::infinity();
        const bool is_sl = f.name.rfind("special_lagrangian", 0) == 0;
        const int n_sa = expensive ? std::min(samples, 30) : std::min(samples, 2000);
        for (double eps : {1e-3, 1e-2, 1e-1}) {
            for (int s = 0; s < n_sa; ++s) {
                Jet2 j = random_jet(rng, f.dim);
                Jet2 shifted(j.r, j.p,
                             j.a + SymMat(2.0 * eps *
                                              Eigen::MatrixXd::Identity(f.dim, f.dim),
                                          1e300));
                double c_f = 1.0;
                if (is_sl) {
                    const double top =
                        ordered_eigenvalues(j.a).cwiseAbs().maxCoeff() + 2.0 * eps;
                    c_f = 1.0 / (1.0 + top * top);
                }
                const double gain =
                    f.margin(x, shifted) - f.margin(x, j) - 2.0 * eps * c_f;
                worst = std::min(worst, gain);
            }
        }
        sa.worst = worst;
        sa.pass = worst >= -1e-9;
        out.push_back(sa);
    }

    if (!expensive) {
        InvariantResult tp{"(T) probe: boundary jets have nearby interior jets", false,
                           false, 0.0, "diagnostics only"};
        const double frac = t_condition_probe(f, 50, seed ^ 0x7777);
        tp.worst = frac;
        tp.pass = frac >= 0.9;
        out.push_back(tp);
    }

    return out;
}

bool all_pass(const std::vector<InvariantResult>& results) {
    for (const auto& r : results)
        if (r.gating && !r.pass) return false;
    return true;
}

}  // namespace subeq
