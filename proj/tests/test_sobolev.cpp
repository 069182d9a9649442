#include "doctest.h"

#include "fraclab/sobolev.hpp"

#include <cmath>

using namespace fraclab;

namespace {

const double kD = std::log(3.0) / std::log(5.0 / 3.0);

EigenBasis basis() {
    return eigensolve(build(Kind::Gasket, 3), BC::Neumann,
                      EigenOptions{.plain = false, .keep_zero_mode = true, .cache_dir = {}});
}

}  // namespace

TEST_CASE("Lebesgue norms of constants and indicator functions") {
    EigenBasis b = basis();
    CVec one = CVec::Ones(b.rows());
    for (double p : {1.0, 2.0, 3.5}) CHECK(lp_norm(b, one, p) == doctest::Approx(1.0).epsilon(1e-13));
    CVec e = CVec::Zero(b.rows());
    e[4] = cplx(0, -2);
    CHECK(lp_norm(b, e, 2) == doctest::Approx(2 * std::sqrt(b.mass[4])).epsilon(1e-14));
    CHECK(lp_norm(b, e, INFINITY) == doctest::Approx(2.0));
    CHECK_THROWS_AS(lp_norm(b, e, 0.5), Error);
}

TEST_CASE("Sobolev norm of an eigenfunction is the Bessel weight") {
    EigenBasis b = basis();
    for (int n : {0, 3, 40, b.size() - 1}) {
        CVec phi = b.vectors.col(n).cast<cplx>();
        for (double s : {-1.0, 0.0, 0.5, 2.0}) {
            double ref = std::pow(1 + b.eigenvalues[n], s / (kD + 1));
            CHECK(hs_norm(phi, s, b, kD) == doctest::Approx(ref).epsilon(1e-11));
        }
    }
}

TEST_CASE("H^0 is L^2 and Bessel powers form a group") {
    EigenBasis b = basis();
    Rng rng(8);
    CVec u = rng.normal_vec(b.rows()).cast<cplx>();
    CHECK(hs_norm(u, 0, b, kD) == doctest::Approx(lp_norm(b, u, 2)).epsilon(1e-12));
    CVec v = bessel_power(bessel_power(u, 1.3, b, kD), -1.3, b, kD);
    CHECK((u - v).cwiseAbs().maxCoeff() < 1e-10 * u.cwiseAbs().maxCoeff());
    CHECK(hs_norm(u, 1.0, b, kD) == doctest::Approx(lp_norm(b, bessel_power(u, 1.0, b, kD), 2)).epsilon(1e-11));
    CHECK(lp_s_norm(u, 0.4, 2, b, kD) == doctest::Approx(hs_norm(u, 0.4, b, kD)).epsilon(1e-11));
}

TEST_CASE("Sobolev norms increase with s") {
    EigenBasis b = basis();
    Rng rng(9);
    CVec u = rng.normal_vec(b.rows()).cast<cplx>();
    double prev = 0;
    for (double s : {-1.0, 0.0, 0.5, 1.0, 2.0}) {
        double h = hs_norm(u, s, b, kD);
        CHECK(h > prev);
        prev = h;
    }
}

TEST_CASE("operator bound is the weighted symbol sup and is attained") {
    EigenBasis b = basis();
    Symbol p = parse_symbol("bessel:-1");
    OpBound r = op_bound_hs(p, kD + 1, 0.7, b, kD);
    CHECK(r.C == doctest::Approx(1.0).epsilon(1e-12));
    // an eigenfunction at the argmax realizes the ratio
    CVec phi = b.vectors.col(r.argmax).cast<cplx>();
    CVec Pu = apply(p, b, phi);
    double ratio = hs_norm(Pu, 0.7 - (kD + 1), b, kD) / hs_norm(phi, 0.7, b, kD);
    CHECK(ratio == doctest::Approx(r.C).epsilon(1e-10));
    Rng rng(1);
    for (int t = 0; t < 10; ++t) {
        CVec u = rng.normal_vec(b.rows()).cast<cplx>();
        CHECK(hs_norm(apply(p, b, u), 0.7 - (kD + 1), b, kD) <= r.C * hs_norm(u, 0.7, b, kD) * (1 + 1e-12));
    }
}

TEST_CASE("embedding ratio stays bounded") {
    EigenBasis b = basis();
    auto r = embedding_check(kD / 4, 2, NAN, b, kD, 20, 3);
    CHECK(r.q == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(r.trials > 0);
    CHECK(std::isfinite(r.max_ratio));
    CHECK(r.max_ratio > 0);
    CHECK_THROWS_AS(embedding_check(kD, 1, NAN, b, kD, 5, 3), Error);
    CHECK_THROWS_AS(embedding_check(0.1, 2, 3, b, kD, 5, 3), Error);
}

TEST_CASE("embedding with s = 0 and q = p is the identity") {
    EigenBasis b = basis();
    auto r = embedding_check(0, 3, 3, b, kD, 5, 2);
    CHECK(r.max_ratio == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("embedding ratio is level-stable") {
    // s = d/2 with p = 2 sits on the endpoint q = infinity, so the sweep uses s = d/4 (q = 4)
    double prev = 0;
    for (int level : {3, 4, 5}) {
        FractalGraph g = build(Kind::Gasket, level);
        EigenBasis b = eigensolve(g, BC::Neumann, EigenOptions{.plain = false, .keep_zero_mode = true, .cache_dir = {}});
        double d = measured_d(g);
        double r = embedding_check(d / 4, 2, NAN, b, d, 10, 4).max_ratio;
        if (prev > 0) CHECK(r / prev <= 2.0);
        prev = r;
    }
}

TEST_CASE("Sobolev norms are homogeneous") {
    EigenBasis b = basis();
    Rng rng(12);
    CVec u = rng.normal_vec(b.rows()).cast<cplx>();
    cplx c(-2.0, 1.5);
    CHECK(hs_norm(c * u, 0.8, b, kD) == doctest::Approx(std::abs(c) * hs_norm(u, 0.8, b, kD)).epsilon(1e-13));
}

TEST_CASE("duality pairing bound") {
    EigenBasis b = basis();
    Rng rng(13);
    const double p = 3, q = 1.5, s = 0.6;
    for (int t = 0; t < 10; ++t) {
        CVec u = rng.normal_vec(b.rows()).cast<cplx>(), v = rng.normal_vec(b.rows()).cast<cplx>();
        cplx pair = 0;
        for (int i = 0; i < b.rows(); ++i) pair += u[i] * std::conj(v[i]) * b.mass[i];
        CHECK(std::abs(pair) <= lp_s_norm(u, s, p, b, kD) * lp_s_norm(v, -s, q, b, kD) * (1 + 1e-12));
    }
}
