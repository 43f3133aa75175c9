#include "subeq/runner.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "subeq/catalog.hpp"
#include "subeq/expr.hpp"
#include "subeq/harness.hpp"
#include "subeq/invariants.hpp"
#include "subeq/solver.hpp"

namespace subeq {

namespace {

using nlohmann::json;

json vec_to_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

void write_json(const std::string& dir, const std::string& name, const json& j,
                std::ostream& out, bool quiet) {
    std::filesystem::create_directories(dir);
    const std::string path = dir + "/" + name;
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write '" + path + "'");
    f << j.dump(2) << "\n";
    if (!quiet) out << j.dump(2) << "\n";
}

MetricChart metric_from(const RunConfig& cfg) {
    return builtin_metric(cfg.get("metric"));
}

DomainSpec domain_from(const RunConfig& cfg) {
    DomainSpec d;
    const std::string text = cfg.get_or("domain", "all");
    d.label = text;
    if (text == "all") {
        d.rho = [](const Eigen::VectorXd&) { return -1.0; };
        return d;
    }
    Expr e = parse_expr(text);
    d.rho = [e](const Eigen::VectorXd& x) { return eval_expr(e, x); };
    return d;
}

Box box_from(const RunConfig& cfg, int n) {
    auto ranges = cfg.get_ranges("box");
    if (int(ranges.size()) != n)
        throw ConfigError("config key 'box': expected " + std::to_string(n) + " ranges");
    Box b;
    b.lo = Eigen::VectorXd(n);
    b.hi = Eigen::VectorXd(n);
    for (int i = 0; i < n; ++i) {
        b.lo[i] = ranges[i].first;
        b.hi[i] = ranges[i].second;
        if (!(b.hi[i] > b.lo[i])) throw ConfigError("config key 'box': empty range");
    }
    return b;
}

std::string verdict_str(AsymVerdict v) {
    switch (v) {
        case AsymVerdict::Yes: return "Yes";
        case AsymVerdict::No: return "No";
        default: return "Undetermined";
    }
}

SolveConfig solve_config_from(const RunConfig& cfg) {
    SolveConfig sc;
    sc.tol_iter = cfg.get_double_or("tol_iter", 1e-10);
    sc.tol_residual = cfg.get_double_or("tol_residual", 1e-8);
    sc.max_sweeps = cfg.get_long_or("max_sweeps", 100000);
    const std::string mode = cfg.get_or("mode", "gs");
    if (mode == "gs")
        sc.mode = SweepMode::GaussSeidel;
    else if (mode == "jacobi")
        sc.mode = SweepMode::Jacobi;
    else
        throw ConfigError("config key 'mode': expected gs or jacobi");
    sc.threads = int(cfg.get_long_or("threads", 1));
    return sc;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err, bool quiet) {
    Subequation f = catalog_construct(cfg.get("subequation"));
    MetricChart metric = metric_from(cfg);
    if (metric.n != f.dim) throw ConfigError("metric and subequation dimensions differ");
    DomainSpec domain = domain_from(cfg);
    Grid grid = Grid::make(box_from(cfg, metric.n), cfg.get_int_list("grid"), domain);
    Expr phi_expr = parse_expr(cfg.get("boundary"));
    GridFunction phi = GridFunction::from(
        grid, [&](const Eigen::VectorXd& x) { return eval_expr(phi_expr, x); });
    SolveConfig sc = solve_config_from(cfg);
    auto [u, rep] = perron_solve(f, metric, grid, phi, sc);
    SubharmonicReport sub = f_subharmonic_test(u, f, metric, sc.tol_residual);
    const std::string dir = cfg.get_or("out", ".");
    std::filesystem::create_directories(dir);
    write_grid_csv(dir + "/solve_u.csv", u);
    json j;
    j["sweeps"] = rep.sweeps;
    j["max_update"] = rep.max_update;
    j["max_margin_residual"] = rep.max_margin_residual;
    j["witness"] = {{"node", rep.witness_node}, {"coords", vec_to_json(rep.witness_coords)}};
    j["verdicts"] = {{"converged", rep.converged},
                     {"f_subharmonic", sub.pass},
                     {"min_margin", sub.min_margin}};
    j["seed"] = cfg.seed();
    j["wall_seconds"] = rep.wall_seconds;
    write_json(dir, "solve_report.json", j, out, quiet);
    if (!rep.converged) {
        err << "solve: not converged after " << rep.sweeps << " sweeps\n";
        return 2;
    }
    return 0;
}

int cmd_convexity(const RunConfig& cfg, std::ostream& out, std::ostream& err, bool quiet) {
    Subequation f = catalog_construct(cfg.get("subequation"));
    MetricChart metric = metric_from(cfg);
    DomainSpec domain = domain_from(cfg);
    Box box = box_from(cfg, metric.n);
    const int points = int(cfg.get_long_or("points", 16));
    auto lambdas = cfg.get_double_list_or("lambdas", {-1.0, 0.0, 1.0});
    ConvexityOptions opts;
    opts.t_pow_max = int(cfg.get_long_or("tmax_pow", 20));
    opts.asym.seed = cfg.seed();
    auto pts = sample_boundary_points(domain, box, points, cfg.seed());
    json per_point = json::array();
    bool all_yes = true;
    bool any_undetermined = false;
    for (const auto& x : pts) {
        auto verdicts = boundary_convexity_test(f, metric, domain, x, lambdas, opts);
        json pj;
        pj["x"] = vec_to_json(x);
        json vj = json::array();
        for (const auto& v : verdicts) {
            vj.push_back({{"lambda", v.lambda},
                          {"verdict", verdict_str(v.verdict)},
                          {"t0", v.t0}});
            if (v.verdict != AsymVerdict::Yes) all_yes = false;
            if (v.verdict == AsymVerdict::Undetermined) any_undetermined = true;
        }
        pj["verdicts"] = vj;
        per_point.push_back(pj);
    }
    json j;
    j["subequation"] = f.name;
    j["points"] = per_point;
    j["verdicts"] = {{"strictly_convex", all_yes}, {"undetermined", any_undetermined}};
    j["seed"] = cfg.seed();
    write_json(cfg.get_or("out", "."), "convexity_report.json", j, out, quiet);
    if (!all_yes) {
        err << "convexity: not strictly convex for every lambda\n";
        return 2;
    }
    return 0;
}

int cmd_dual_check(const RunConfig& cfg, std::ostream& out, std::ostream& err, bool quiet) {
    Subequation f = catalog_construct(cfg.get("subequation"));
    const int samples = int(cfg.get_long_or("samples", 10000));
    auto results = subequation_invariant_suite(f, samples, cfg.seed());
    json j;
    j["subequation"] = f.name;
    j["samples"] = samples;
    j["seed"] = cfg.seed();
    json checks = json::array();
    for (const auto& r : results)
        checks.push_back({{"name", r.name},
                          {"pass", r.pass},
                          {"gating", r.gating},
                          {"worst", r.worst},
                          {"note", r.note}});
    j["verdicts"] = checks;
    const bool ok = all_pass(results);
    j["pass"] = ok;
    write_json(cfg.get_or("out", "."), "dual_check_report.json", j, out, quiet);
    if (!ok) {
        err << "dual-check: invariant failures for " << f.name << "\n";
        return 2;
    }
    return 0;
}

int cmd_barrier(const RunConfig& cfg, std::ostream& out, std::ostream& err, bool quiet) {
    Subequation f = catalog_construct(cfg.get("subequation"));
    MetricChart metric = metric_from(cfg);
    DomainSpec domain = domain_from(cfg);
    auto x0_list = cfg.get_double_list_or("x0", {});
    if (int(x0_list.size()) != metric.n)
        throw ConfigError("config key 'x0': expected " + std::to_string(metric.n) + " numbers");
    Eigen::VectorXd x0(metric.n);
    for (int i = 0; i < metric.n; ++i) x0[i] = x0_list[i];
    const double lambda = cfg.get_double_or("lambda", 0.0);
    BarrierOptions opts;
    opts.seed = cfg.seed();
    opts.strictness = cfg.get_double_or("strictness", 1e-6);
    BarrierResult res = make_barrier(f, metric, domain, x0, lambda, opts);
    json j;
    j["subequation"] = f.name;
    j["x0"] = vec_to_json(x0);
    j["lambda"] = lambda;
    j["found"] = res.found;
    j["seed"] = cfg.seed();
    if (res.found) {
        j["C"] = res.c_big;
        j["eps"] = res.eps;
        j["r0"] = res.r0;
    } else {
        j["diagnostics"] = res.diagnostics;
    }
    write_json(cfg.get_or("out", "."), "barrier_report.json", j, out, quiet);
    if (!res.found) {
        err << "barrier: " << res.diagnostics << "\n";
        return 2;
    }
    return 0;
}

int cmd_counterexample(const RunConfig& cfg, std::ostream& out, std::ostream&, bool quiet) {
    AppendixDOptions opts;
    opts.delta_nodes = int(cfg.get_long_or("delta_nodes", 41));
    opts.seed = cfg.seed();
    AppendixDReport rep = appendix_d_harness(cfg.get_double_or("c", 0.5), opts);
    json j;
    j["c"] = rep.c;
    j["delta_nodes"] = rep.delta_nodes;
    j["signature"] = {{"samples", rep.signature_samples},
                      {"hits", rep.signature_hits},
                      {"zero_band", rep.zero_band}};
    j["zmp"] = {{"applicable", rep.zmp.applicable},
                {"boundary_max", rep.zmp.boundary_max},
                {"violation", rep.zmp.violation},
                {"magnitude", rep.zmp.magnitude},
                {"witness", vec_to_json(rep.zmp.witness_coords)}};
    j["lambda4_residual_u1"] = rep.lambda4_residual_u1;
    j["lambda4_residual_v"] = rep.lambda4_residual_v;
    j["boundary_agreement_max"] = rep.boundary_agreement_max;
    j["interior_gap_at_band"] = rep.interior_gap_at_band;
    j["seed"] = cfg.seed();
    j["wall_seconds"] = rep.wall_seconds;
    write_json(cfg.get_or("out", "."), "counterexample_report.json", j, out, quiet);
    return 0;
}

int cmd_sums_probe(const RunConfig& cfg, std::ostream& out, std::ostream&, bool quiet) {
    auto epsilons =
        cfg.get_double_list_or("epsilons", {1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125});
    json j;
    SumsProbeReport rep;
    if (cfg.get_or("pair", "") == "appendix_d") {
        const double c = cfg.get_double_or("c", 0.5);
        AppendixDGrid gg = appendix_d_grid(c, int(cfg.get_long_or("delta_nodes", 13)), 3);
        AppendixDFields fields = appendix_d_fields();
        auto u1 = fields.u1;
        auto u2 = fields.u2;
        GridFunction u = GridFunction::from(gg.grid, u1);
        GridFunction v = GridFunction::from(
            gg.grid, [&](const Eigen::VectorXd& x) { return u2(x) + c; });
        rep = sums_probe(u, v, gg.region, gg.shell, epsilons);
        j["pair"] = "appendix_d";
        j["c"] = c;
    } else {
        MetricChart metric = metric_from(cfg);
        DomainSpec domain = domain_from(cfg);
        Grid grid = Grid::make(box_from(cfg, metric.n), cfg.get_int_list("grid"), domain);
        Expr ue = parse_expr(cfg.get("u"));
        Expr ve = parse_expr(cfg.get("v"));
        GridFunction u = GridFunction::from(
            grid, [&](const Eigen::VectorXd& x) { return eval_expr(ue, x); });
        GridFunction v = GridFunction::from(
            grid, [&](const Eigen::VectorXd& x) { return eval_expr(ve, x); });
        rep = sums_probe(u, v, grid.interior, grid.boundary, epsilons);
    }
    j["applicable"] = rep.applicable;
    j["m0"] = rep.m0;
    json steps = json::array();
    for (const auto& s : rep.steps)
        steps.push_back({{"epsilon", s.epsilon},
                         {"m_eps", s.m_eps},
                         {"x", vec_to_json(s.x)},
                         {"y", vec_to_json(s.y)},
                         {"p_eps", vec_to_json(s.p_eps)},
                         {"penalty", s.penalty}});
    j["steps"] = steps;
    j["monotone"] = rep.monotone;
    j["penalty_vanishes"] = rep.penalty_vanishes;
    j["seed"] = cfg.seed();
    write_json(cfg.get_or("out", "."), "sums_probe_report.json", j, out, quiet);
    return 0;
}

int cmd_catalog(const RunConfig& cfg, std::ostream& out, std::ostream&, bool quiet) {
    json entries = json::array();
    for (const auto& e : catalog_list())
        entries.push_back({{"name", e.name},
                           {"params", e.params},
                           {"margin", e.margin_desc},
                           {"dual", e.dual_desc},
                           {"notes", e.notes}});
    json j;
    j["entries"] = entries;
    write_json(cfg.get_or("out", "."), "catalog.json", j, out, quiet);
    return 0;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const bool quiet = cfg.get_or("quiet", "0") != "0";
    try {
        const std::string command = cfg.get("command");
        if (command == "solve") return cmd_solve(cfg, out, err, quiet);
        if (command == "convexity") return cmd_convexity(cfg, out, err, quiet);
        if (command == "dual-check") return cmd_dual_check(cfg, out, err, quiet);
        if (command == "barrier") return cmd_barrier(cfg, out, err, quiet);
        if (command == "counterexample") return cmd_counterexample(cfg, out, err, quiet);
        if (command == "sums-probe") return cmd_sums_probe(cfg, out, err, quiet);
        if (command == "catalog") return cmd_catalog(cfg, out, err, quiet);
        throw ConfigError("unknown command '" + command + "'");
    } catch (const InternalDefect& e) {
        err << "internal defect: " << e.what() << "\n";
        return 4;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 3;
    } catch (const InvalidArgument& e) {
        err << "config error: " << e.what() << "\n";
        return 3;
    } catch (const FlatUpdateError& e) {
        err << "solver: " << e.what() << "\n";
        return 2;
    } catch (const ValueCapError& e) {
        err << "solver: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace subeq
