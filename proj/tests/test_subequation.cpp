#include <doctest.h>

#include <cmath>

#include "subeq/catalog.hpp"
#include "subeq/invariants.hpp"

using namespace subeq;

namespace {

const Eigen::VectorXd x0_2 = Eigen::VectorXd::Zero(2);
const Eigen::VectorXd x0_3 = Eigen::VectorXd::Zero(3);

Jet2 pure(const Eigen::MatrixXd& a) { return Jet2::pure_second_order(SymMat(a, 1e300)); }

}  // namespace

TEST_CASE("contains classifies against the margin") {
    Subequation p = make_pq(2, 1);
    CHECK(contains(p, x0_2, pure(Eigen::MatrixXd::Identity(2, 2))) == Region::Inside);
    CHECK(contains(p, x0_2, pure(Eigen::Vector2d(1, 0).asDiagonal())) == Region::Boundary);
    for (int q = 1; q <= 2; ++q)
        CHECK(contains(make_pq(2, q), x0_2, pure(-Eigen::MatrixXd::Identity(2, 2))) ==
              Region::Outside);
}

TEST_CASE("dual swaps hand margins; Pq duality is exact") {
    Rng rng(101);
    for (int n = 2; n <= 5; ++n)
        for (int q = 1; q <= n; ++q) {
            Subequation d = dual(make_pq(n, q));
            Subequation expect = make_pq(n, n - q + 1);
            CHECK(d.name == expect.name);
            for (int s = 0; s < 500; ++s) {
                Jet2 j = random_jet(rng, n);
                CHECK(std::abs(d.margin(Eigen::VectorXd::Zero(n), j) -
                               expect.margin(Eigen::VectorXd::Zero(n), j)) <= 1e-10);
            }
        }
    // double dual restores the original margin function
    Subequation p = make_pq(3, 2);
    Subequation dd = dual(dual(p));
    for (int s = 0; s < 100; ++s) {
        Jet2 j = random_jet(rng, 3);
        CHECK(dd.margin(x0_3, j) == p.margin(x0_3, j));
    }
}

TEST_CASE("special lagrangian duality and harmonic example") {
    Subequation sl0 = make_special_lagrangian(2, 0.0);
    CHECK(std::abs(sl0.margin(x0_2, pure(Eigen::Vector2d(2, -2).asDiagonal()))) <= 1e-14);
    Rng rng(103);
    for (double c : {-1.5, 0.0, 1.5}) {
        Subequation d = dual(make_special_lagrangian(3, c));
        Subequation expect = make_special_lagrangian(3, -c);
        for (int s = 0; s < 500; ++s) {
            Jet2 j = random_jet(rng, 3);
            CHECK(std::abs(d.margin(x0_3, j) - expect.margin(x0_3, j)) <= 1e-12);
        }
    }
}

TEST_CASE("grassmann entry margins") {
    Subequation g = make_grassmann_p(4, 2);
    Eigen::Vector4d d(-1, 0, 2, 3);
    CHECK(g.margin(Eigen::VectorXd::Zero(4), pure(d.asDiagonal())) ==
          doctest::Approx(-1.0).epsilon(1e-12));
    // dual margin is the top 2-fold sum
    CHECK(g.dual_margin(Eigen::VectorXd::Zero(4), pure(d.asDiagonal())) ==
          doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("translate shifts membership and commutes with duality") {
    Subequation p = make_pq(2, 1);
    auto j0 = [](const Eigen::VectorXd& x) {
        const double f = 0.25 + x.squaredNorm();
        return Jet2(0.0, Eigen::VectorXd::Zero(2),
                    SymMat(f * Eigen::MatrixXd::Identity(2, 2), 1e300));
    };
    Subequation t = translate(p, j0);
    Eigen::VectorXd x(2);
    x << 0.5, 0.0;  // f(x) = 0.5
    CHECK(contains(t, x, pure(0.4 * Eigen::MatrixXd::Identity(2, 2))) == Region::Outside);
    CHECK(contains(t, x, pure(0.6 * Eigen::MatrixXd::Identity(2, 2))) == Region::Inside);
    // membership <=> lambda_1(A) >= f(x)
    Rng rng(107);
    for (int s = 0; s < 500; ++s) {
        Jet2 j = random_jet(rng, 2);
        const double lhs = t.margin(x, j);
        const double rhs = ordered_eigenvalues(j.a)[0] - 0.5;
        CHECK(std::abs(lhs - rhs) <= 1e-12);
    }
    // translate by zero is the identity
    Subequation t0 = translate(p, [](const Eigen::VectorXd&) { return Jet2::zero(2); });
    for (int s = 0; s < 100; ++s) {
        Jet2 j = random_jet(rng, 2);
        CHECK(t0.margin(x0_2, j) == p.margin(x0_2, j));
    }
    // dual(translate(F, J0)) agrees in sign with translate(dual(F), -J0)
    Subequation lhsd = dual(t);
    Subequation rhsd = translate(dual(p), [j0](const Eigen::VectorXd& xx) {
        return -j0(xx);
    });
    for (int s = 0; s < 2000; ++s) {
        Jet2 j = random_jet(rng, 2);
        const double a = lhsd.margin(x, j), b = rhsd.margin(x, j);
        if (std::abs(a) > 1e-9 || std::abs(b) > 1e-9) CHECK((a >= 0.0) == (b >= 0.0));
    }
}

TEST_CASE("affine jet maps invert and transform entries") {
    Rng rng(109);
    AffineJetMap phi;
    phi.dim = 3;
    Eigen::MatrixXd gm = gauss_matrix(rng, 3, 3) + 3.0 * Eigen::MatrixXd::Identity(3, 3);
    Eigen::MatrixXd hm = gauss_matrix(rng, 3, 3) + 3.0 * Eigen::MatrixXd::Identity(3, 3);
    SymMat lbase(gauss_symmetric(rng, 3), 1e300);
    Jet2 off = random_jet(rng, 3);
    phi.g = [gm](const Eigen::VectorXd&) { return gm; };
    phi.h = [hm](const Eigen::VectorXd&) { return hm; };
    phi.l = [lbase](const Eigen::VectorXd&, const Eigen::VectorXd& p) {
        return SymMat(p[0] * lbase.mat(), 1e300);
    };
    phi.j0 = [off](const Eigen::VectorXd&) { return off; };
    for (int s = 0; s < 200; ++s) {
        Jet2 j = random_jet(rng, 3);
        Jet2 round = phi.apply_inverse(x0_3, phi.apply(x0_3, j));
        CHECK(jet_distance(round, j) <= 1e-10 * (1.0 + j.norm()));
    }
    // identity transform leaves margins alone
    Subequation p = make_pq(3, 1);
    Subequation ident = affine_transform(p, AffineJetMap::identity(3));
    for (int s = 0; s < 100; ++s) {
        Jet2 j = random_jet(rng, 3);
        CHECK(ident.margin(x0_3, j) == p.margin(x0_3, j));
    }
}

TEST_CASE("monotonicity checks for catalog entries") {
    MonotoneSet pp2 = pure_p_cone(2);
    CHECK(monotonicity_check(make_pq(2, 1), pp2, 200, 41).pass);
    CHECK(monotonicity_check(make_pq(2, 2), pp2, 200, 42).pass);
    CHECK(monotonicity_check(make_special_lagrangian(2, 0.5), pp2, 200, 43).pass);
    CHECK(monotonicity_check(make_eikonal(2), pp2, 200, 44).pass);
}

TEST_CASE("c-strict membership certificates") {
    Subequation p = make_pq(2, 1);
    CHECK(c_strict_contains(p, x0_2, pure(2.0 * Eigen::MatrixXd::Identity(2, 2)), 1.0)
              .certified);
    auto res = c_strict_contains(p, x0_2, pure(Eigen::Vector2d(0, 1).asDiagonal()), 0.1);
    CHECK(!res.certified);
    CHECK(res.witness.has_value());
    // stability: c-strict at J implies (c/2)-strict at J + delta Psi, |delta Psi| <= c/2
    Rng rng(113);
    for (int s = 0; s < 200; ++s) {
        Jet2 j = random_jet(rng, 2);
        const double c = 0.3;
        if (p.margin(x0_2, j) / *p.lipschitz_bound < c) continue;
        Jet2 psi = random_jet(rng, 2);
        psi = (c / (2.0 * psi.norm())) * psi;
        CHECK(c_strict_contains(p, x0_2, j + psi, c / 2.0).certified);
    }
}

TEST_CASE("asymptotic interior: cones are exact, eikonal is empty") {
    Rng rng(127);
    for (int s = 0; s < 300; ++s) {
        Jet2 j = random_jet(rng, 3);
        for (int q = 1; q <= 3; ++q) {
            auto res = asymptotic_interior_contains(make_pq(3, q), x0_3, j.p, j.a);
            const double lq = ordered_eigenvalues(j.a)[q - 1];
            if (lq > 0.0)
                CHECK(res.verdict == AsymVerdict::Yes);
            else
                CHECK(res.verdict == AsymVerdict::No);
        }
    }
    Subequation eik = make_eikonal(2);
    AsymOptions small;
    small.neighbors = 32;
    small.t_pow_max = 12;
    for (int s = 0; s < 20; ++s) {
        Jet2 j = random_jet(rng, 2);
        CHECK(asymptotic_interior_contains(eik, x0_2, j.p, j.a, small).verdict ==
              AsymVerdict::No);
    }
}

TEST_CASE("asymptotic interior of the special lagrangian entries") {
    // Yes iff lambda_q(A) > 0 with q = ceil((n - c) / 2).
    Rng rng(131);
    const int n = 3;
    AsymOptions opts;
    opts.neighbors = 48;
    opts.t_pow_max = 22;
    for (double c : {-1.5, 0.0, 1.5}) {
        Subequation f = make_special_lagrangian(n, c);
        const int q = int(std::ceil((n - c) / 2.0));
        int checked = 0;
        for (int s = 0; s < 200 && checked < 60; ++s) {
            Jet2 j = random_jet(rng, n);
            const double lq = ordered_eigenvalues(j.a)[q - 1];
            if (std::abs(lq) < 0.2) continue;  // stay off the decision boundary
            ++checked;
            auto res = asymptotic_interior_contains(f, x0_3, j.p, j.a, opts);
            if (lq > 0.0)
                CHECK(res.verdict == AsymVerdict::Yes);
            else
                CHECK(res.verdict == AsymVerdict::No);
        }
        CHECK(checked >= 40);
    }
}

TEST_CASE("eigen boundary graph") {
    Eigen::Vector2d mu(1, -1);
    CHECK(eigen_boundary_graph(make_pq(2, 1), mu) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(eigen_boundary_graph(make_pq(2, 2), mu) == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(std::abs(eigen_boundary_graph(make_pq(2, 1), Eigen::Vector2d(0, 0))) <= 1e-9);
    CHECK(std::abs(eigen_boundary_graph(make_grassmann_p(3, 2), Eigen::Vector3d(0, 0, 0))) <=
          1e-9);
    // Lipschitz bounds -max(mu) <= f(lam + mu) - f(lam) <= -min(mu)
    Rng rng(137);
    Subequation g = make_grassmann_p(3, 2);
    for (int s = 0; s < 100; ++s) {
        Eigen::Vector3d lam = gauss_vector(rng, 3);
        lam.array() -= lam.mean();
        Eigen::Vector3d mu3 = gauss_vector(rng, 3);
        mu3.array() -= mu3.mean();
        const double df = eigen_boundary_graph(g, lam + mu3) - eigen_boundary_graph(g, lam);
        CHECK(df <= -mu3.minCoeff() + 1e-8);
        CHECK(df >= -mu3.maxCoeff() - 1e-8);
    }
    // unbounded-below margins are rejected
    Subequation eik = make_eikonal(2);
    Subequation fake = eik;
    fake.flags.pure_second_order = true;
    CHECK_THROWS_AS(eigen_boundary_graph(fake, Eigen::Vector2d(1, -1)), InvalidArgument);
}

TEST_CASE("invariant suite passes for core entries") {
    for (const char* spec :
         {"Pq:n=3,q=2", "laplace:n=2", "grassmann_p:n=4,p=2", "special_lagrangian:c=0.5,n=3",
          "sigma_branch:j=2,k=3,n=4", "eikonal:n=2", "inf_laplace:n=2", "p_laplace:k=3,n=2",
          "minimal_surface:n=2", "monge_ampere_exp:n=2", "example_12_8:n=2,sign=minus",
          "Pq_complex:n=4,q=2", "Pq_quaternionic:n=4,q=1"}) {
        auto results = subequation_invariant_suite(catalog_construct(spec), 1500, 1234);
        for (const auto& r : results) {
            INFO(spec, ": ", r.name, " worst=", r.worst);
            if (r.gating) CHECK(r.pass);
        }
    }
}
