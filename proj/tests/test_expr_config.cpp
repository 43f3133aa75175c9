#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "subeq/expr.hpp"
#include "subeq/rng.hpp"
#include "subeq/runner.hpp"

using namespace subeq;

namespace {

double ev(const std::string& text, std::initializer_list<double> xs = {3.0, 4.0, 0.0}) {
    Eigen::VectorXd x(int(xs.size()));
    int i = 0;
    for (double v : xs) x[i++] = v;
    return eval_expr(parse_expr(text), x);
}

}  // namespace

TEST_CASE("expression golden table") {
    const double pi = 3.14159265358979323846;
    const double e = 2.71828182845904523536;
    struct Row {
        const char* text;
        double want;
    };
    const Row rows[] = {
        {"1+2", 3.0},
        {"2*3+4", 10.0},
        {"2+3*4", 14.0},
        {"10/4", 2.5},
        {"2^3", 8.0},
        {"2^3^2", 512.0},
        {"-2^2", -4.0},
        {"(-2)^2", 4.0},
        {"2^-1", 0.5},
        {"1-2-3", -4.0},
        {"12/3/2", 2.0},
        {"5-3*2", -1.0},
        {"(1+2)*(3+4)", 21.0},
        {"0.5*4", 2.0},
        {".25+.75", 1.0},
        {"pi", pi},
        {"e", e},
        {"2*pi", 2.0 * pi},
        {"sin(0)", 0.0},
        {"cos(0)", 1.0},
        {"sin(pi/2)", 1.0},
        {"cos(pi)", -1.0},
        {"tan(0)", 0.0},
        {"tan(pi/4)", 1.0},
        {"exp(0)", 1.0},
        {"exp(1)", e},
        {"log(1)", 0.0},
        {"log(e)", 1.0},
        {"sqrt(4)", 2.0},
        {"sqrt(2)^2", 2.0},
        {"abs(-3.5)", 3.5},
        {"abs(2)", 2.0},
        {"atan(0)", 0.0},
        {"atan(1)", pi / 4.0},
        {"atan(2)+atan(-2)", 0.0},
        {"min(2,3)", 2.0},
        {"max(2,3)", 3.0},
        {"min(-1,1)*max(2,5)", -5.0},
        {"x1", 3.0},
        {"x2", 4.0},
        {"x1^2-x2^2", -7.0},
        {"x1*x2", 12.0},
        {"-x1^2", -9.0},
        {"(-x1)^2", 9.0},
        {"sqrt(x1^2+x2^2)", 5.0},
        {"2*x1-3/x2", 5.25},
        {"exp(log(5))", 5.0},
        {"cos(2*pi)", 1.0},
        {"1/2^2", 0.25},
        {"max(x1,x2)-min(x1,x2)", 1.0},
    };
    int count = 0;
    for (const Row& r : rows) {
        const double got = ev(r.text);
        const double scale = std::max(1.0, std::abs(r.want));
        INFO(r.text);
        CHECK(std::abs(got - r.want) <= 1e-12 * scale);
        ++count;
    }
    CHECK(count == 50);
    // ball defining function at the origin
    CHECK(ev("x1^2+x2^2+x3^2-1", {0.0, 0.0, 0.0}) == doctest::Approx(-1.0));
}

TEST_CASE("expression errors carry byte offsets") {
    CHECK_THROWS_WITH_AS(parse_expr("1+"), doctest::Contains("byte 2"), ConfigError);
    CHECK_THROWS_AS(parse_expr("foo(1)"), ConfigError);
    CHECK_THROWS_AS(parse_expr("min(1)"), ConfigError);
    CHECK_THROWS_AS(parse_expr("sin(1,2)"), ConfigError);
    CHECK_THROWS_AS(parse_expr("y1+1"), ConfigError);
    CHECK_THROWS_AS(parse_expr("x10"), ConfigError);
    CHECK_THROWS_AS(parse_expr("(1+2"), ConfigError);
    CHECK_THROWS_AS(parse_expr("1+2)"), ConfigError);
    // evaluating x3 against a 2-point is an error
    Expr e = parse_expr("x3");
    CHECK_THROWS_AS(eval_expr(e, Eigen::Vector2d(1, 2)), ConfigError);
}

TEST_CASE("parse-print-parse identity") {
    Rng rng(77);
    for (const char* text :
         {"x1^2-x2^2", "-x1^2", "atan(2)+atan(-2)", "min(x1,max(x2,3))*2",
          "1/(1+exp(-x1))", "sqrt(abs(x1-x2))^3", "2^-x1"}) {
        Expr e1 = parse_expr(text);
        std::string printed = print_expr(e1);
        Expr e2 = parse_expr(printed);
        CHECK(print_expr(e2) == printed);
        for (int s = 0; s < 20; ++s) {
            Eigen::Vector2d x(gauss(rng), gauss(rng));
            const double a = eval_expr(e1, x), b = eval_expr(e2, x);
            if (std::isfinite(a))
                CHECK(a == doctest::Approx(b).epsilon(1e-15));
        }
    }
}

TEST_CASE("config round trip is bytewise") {
    const std::string text =
        "command=solve\n"
        "subequation=laplace:n=2   # the linear case\n"
        "metric=euclidean:n=2\n"
        "box=0:1,0:1\n"
        "grid=9,9\n"
        "boundary=x1^2-x2^2\n"
        "seed=7\n";
    RunConfig c = parse_config_text(text);
    const std::string s1 = serialize_config(c);
    const std::string s2 = serialize_config(parse_config_text(s1));
    CHECK(s1 == s2);
    CHECK(c.get("subequation") == "laplace:n=2");
    CHECK_THROWS_AS(parse_config_text("bogus_key=1\n"), ConfigError);
    // JSON form canonicalizes identically
    RunConfig j = parse_config_text(
        R"({"command":"solve","subequation":"laplace:n=2","metric":"euclidean:n=2",)"
        R"("box":"0:1,0:1","grid":"9,9","boundary":"x1^2-x2^2","seed":7})");
    CHECK(serialize_config(j) == s1);
    CHECK_THROWS_AS(parse_config_text(R"({"command":["a"]})"), ConfigError);
}

TEST_CASE("runner end to end") {
    namespace fs = std::filesystem;
    const std::string dir = "runner_test_out";
    fs::remove_all(dir);
    std::ostringstream out, err;

    RunConfig cat = parse_config_text("command=catalog\nquiet=1\n");
    cat.set("out", dir);
    CHECK(run(cat, out, err) == 0);
    CHECK(fs::exists(dir + "/catalog.json"));

    RunConfig solve = parse_config_text(
        "command=solve\nsubequation=laplace:n=2\nmetric=euclidean:n=2\n"
        "box=0:1,0:1\ngrid=9,9\nboundary=x1^2-x2^2\nquiet=1\n");
    solve.set("out", dir);
    CHECK(run(solve, out, err) == 0);
    CHECK(fs::exists(dir + "/solve_u.csv"));
    CHECK(fs::exists(dir + "/solve_report.json"));

    RunConfig conv = parse_config_text(
        "command=convexity\nsubequation=eikonal:n=2\nmetric=euclidean:n=2\n"
        "domain=x1^2+x2^2-1\nbox=-1.3:1.3,-1.3:1.3\npoints=4\nquiet=1\ntmax_pow=10\n");
    conv.set("out", dir);
    CHECK(run(conv, out, err) == 2);  // all verdicts No

    RunConfig dual = parse_config_text(
        "command=dual-check\nsubequation=Pq:n=3,q=2\nsamples=500\nquiet=1\n");
    dual.set("out", dir);
    CHECK(run(dual, out, err) == 0);

    RunConfig barrier = parse_config_text(
        "command=barrier\nsubequation=Pq:n=2,q=1\nmetric=euclidean:n=2\n"
        "domain=x1^2+x2^2-1\nx0=1,0\nlambda=0\nsamples=100\nquiet=1\n");
    barrier.set("out", dir);
    CHECK(run(barrier, out, err) == 0);

    RunConfig sums = parse_config_text(
        "command=sums-probe\nmetric=euclidean:n=1\nbox=-1:1\ngrid=31\n"
        "u=1-x1^2\nv=0*x1\nepsilons=1,0.5,0.25\nquiet=1\n");
    sums.set("out", dir);
    CHECK(run(sums, out, err) == 0);

    RunConfig bad = parse_config_text("command=never\nquiet=1\n");
    CHECK(run(bad, out, err) == 3);

    // randomized commands are reproducible from the recorded seed
    RunConfig conv2 = parse_config_text(
        "command=convexity\nsubequation=Pq:n=2,q=1\nmetric=euclidean:n=2\n"
        "domain=x1^2+x2^2-1\nbox=-1.3:1.3,-1.3:1.3\npoints=3\nseed=99\nquiet=1\n");
    conv2.set("out", dir);
    CHECK(run(conv2, out, err) == 0);
    std::string first = [&dir] {
        std::ifstream f(dir + "/convexity_report.json");
        std::stringstream ss;
        ss << f.rdbuf();
        return ss.str();
    }();
    CHECK(run(conv2, out, err) == 0);
    std::string second = [&dir] {
        std::ifstream f(dir + "/convexity_report.json");
        std::stringstream ss;
        ss << f.rdbuf();
        return ss.str();
    }();
    CHECK(first == second);

    RunConfig flat = parse_config_text(
        "command=solve\nsubequation=eikonal:n=2\nmetric=euclidean:n=2\n"
        "box=0:1,0:1\ngrid=9,9\nboundary=0*x1\nquiet=1\n");
    flat.set("out", dir);
    CHECK(run(flat, out, err) == 2);

    fs::remove_all(dir);
}
