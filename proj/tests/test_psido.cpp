#include "doctest.h"
#include "oracles.hpp"

#include "fraclab/psido.hpp"

#include <cmath>

using namespace fraclab;

namespace {

const double kD = std::log(3.0) / std::log(5.0 / 3.0);

// f(-Delta) u via a dense symmetric eigendecomposition
CVec dense_apply(const EigenBasis& b, const std::function<cplx(double)>& f, const Vec& u) {
    Mat E = oracle::energy(*b.graph, false);
    const int n = b.rows();
    Mat A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            A(i, j) = E(b.active[std::size_t(i)], b.active[std::size_t(j)]) / std::sqrt(b.mass[i] * b.mass[j]);
    Eigen::SelfAdjointEigenSolver<Mat> es(A);
    CVec w(n);
    for (int k = 0; k < n; ++k) w[k] = f(es.eigenvalues()[k]);
    Vec s = b.mass.array().sqrt();
    CVec y = es.eigenvectors().transpose() * (s.asDiagonal() * u);
    CVec z = es.eigenvectors().cast<cplx>() * w.asDiagonal() * y;
    return s.cwiseInverse().cast<cplx>().asDiagonal() * z;
}

}  // namespace

TEST_CASE("expressions evaluate with aliases and complex constants") {
    Expr e("2*l^2 + exp(0) - 3/lambda", {{"l", "lambda"}});
    CHECK(std::abs(e.eval(std::vector<cplx>{2.0}) - cplx(7.5)) < 1e-14);
    CHECK(e.uses(0));
    CHECK(std::abs(parse_constant("1+2i") - cplx(1, 2)) < 1e-15);
    CHECK_THROWS_AS(Expr("2*(l", {{"l"}}), Error);
    CHECK_THROWS_AS(Expr("q+1", {{"l"}}), Error);
}

TEST_CASE("closed-form jets agree with the falling-factorial formula") {
    const double s = 0.7, l = 3.5;
    Symbol p = bessel(s);
    auto der = p.derivatives(l, 5);
    double coef = 1;
    for (int j = 0; j <= 5; ++j) {
        double ref = coef * std::pow(1 + l, -s - j);
        CHECK(std::abs(der[std::size_t(j)] - ref) < 1e-12 * std::abs(ref));
        coef *= -s - j;
    }
}

TEST_CASE("Richardson derivatives of sin") {
    auto d = richardson_derivatives([](double x) { return cplx(std::sin(x)); }, 1.3, 4);
    CHECK(std::abs(d[1] - std::cos(1.3)) < 1e-9);
    CHECK(std::abs(d[2] + std::sin(1.3)) < 1e-7);
    CHECK(std::abs(d[3] + std::cos(1.3)) < 1e-5);
    CHECK(std::abs(d[4] - std::sin(1.3)) < 1e-3);
}

TEST_CASE("expression symbols differentiate exactly") {
    Symbol p = parse_symbol("l^3/(1+l)");
    auto d = p.derivatives(2.0, 2);
    // f = l^3/(1+l): f' = (2l^3 + 3l^2)/(1+l)^2
    CHECK(std::abs(d[1] - (16.0 + 12.0) / 9.0) < 1e-13);
}

TEST_CASE("symbol registry") {
    CHECK(parse_symbol("bessel:1").order_exponent == -1);
    CHECK(parse_symbol("riesz:-0.5").needs_nonzero);
    CHECK(!parse_symbol("imaginary-power:2").real);
    CHECK(std::abs(parse_symbol("heat:0.5")(2.0) - std::exp(-1.0)) < 1e-15);
    CHECK(std::abs(parse_symbol("ratio")(3.0) - 0.75) < 1e-15);
    CHECK_THROWS_AS(parse_symbol("heat:-1"), Error);
    CHECK_THROWS_AS(parse_symbol("nosuch:1"), Error);
}

TEST_CASE("symbol class membership") {
    auto grid = dyadic_grid(1e-2, 1e6);
    auto r = verify_symbol_class(bessel(1.0), -(kD + 1), 1, 4, grid, kD);
    CHECK(r.passes);
    CHECK(r.closed_form);
    for (double c : r.C) CHECK(c <= 1.0 + 1e-12);
    // lambda^2 is not of order 0
    auto bad = verify_symbol_class(parse_symbol("l^2"), 0, 1, 2, grid, kD);
    CHECK(!bad.passes);
    auto ok = verify_symbol_class(parse_symbol("l^2"), 2 * (kD + 1), 1, 2, grid, kD);
    CHECK(ok.passes);
}

TEST_CASE("tail stability") {
    CHECK(tail_stable({1, 1, 1, 1, 1, 1, 1, 1}));
    CHECK(!tail_stable({1, 1, 1, 1, 1, 1, 5, 9}));
    CHECK(tail_stable({1, 2, 0, 0}));
}

TEST_CASE("Littlewood-Paley window telescopes to one") {
    for (double l : {0.0, 0.5, 1.3, 7.0, 123.0, 4096.5}) {
        double s = lp_eta(l);
        for (int n = 1; n < 40; ++n) s += lp_delta(std::ldexp(l, -n));
        CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK(lp_eta(0.9) == 1);
    CHECK(lp_eta(2.1) == 0);
    auto grid = dyadic_grid(1, 1024);
    auto dec = lp_decompose(bessel(0.5), 0, 12, grid);
    CHECK(dec.pieces.size() == 13);
    CHECK(dec.reconstruction_error < 1e-12);
}

TEST_CASE("spectral application matches the dense functional calculus") {
    EigenBasis b = eigensolve(build(Kind::Gasket, 3), BC::Dirichlet);
    Rng rng(11);
    Vec u = rng.normal_vec(b.rows());
    for (const char* spec : {"bessel:0.8", "riesz:-1", "imaginary-power:1.5", "heat:0.001"}) {
        Symbol p = parse_symbol(spec);
        CVec got = apply(p, b, u);
        CVec ref = dense_apply(b, p.eval, u);
        CHECK((got - ref).cwiseAbs().maxCoeff() < 1e-9 * ref.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("the Riesz symbol of order one is the Laplacian") {
    EigenBasis b = eigensolve(build(Kind::Gasket, 3), BC::Dirichlet);
    Rng rng(2);
    Vec u = rng.normal_vec(b.rows());
    CVec got = apply(riesz(-1.0), b, u);
    Vec ref = b.laplacian() * u;
    CHECK((got.real() - ref).cwiseAbs().maxCoeff() < 1e-9 * ref.cwiseAbs().maxCoeff());
}

TEST_CASE("composition is multiplication of symbols") {
    EigenBasis b = eigensolve(build(Kind::Gasket, 3), BC::Neumann);
    auto r = compose_check(bessel(0.5), imaginary_power(0.7), b, 20, 5);
    CHECK(r.trials == 20);
    CHECK(r.max_deviation < 1e-12);
}

TEST_CASE("kernel integration reproduces the operator") {
    EigenBasis b = eigensolve(build(Kind::Gasket, 2), BC::Dirichlet);
    Symbol p = bessel(0.3);
    KernelMatrix K = kernel(p, b);
    CHECK(K.is_real(1e-14));
    Rng rng(4);
    CVec u = rng.normal_vec(b.rows()).cast<cplx>();
    CHECK((K.integrate(b, u) - apply(p, b, u)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("smoothing kernels decay off the diagonal") {
    FractalGraph g = build(Kind::Gasket, 3);
    EigenBasis b = eigensolve(g, BC::Neumann);
    Mat R = resistance_matrix(g);
    KernelMatrix K = kernel(ratio_symbol(), b);
    DecayReport r = decay_report(K, b, R, kD);
    CHECK(std::isfinite(r.sup));
    CHECK(r.admissible > 0);
    CHECK(r.argmax_r >= r.exclusion);
    CHECK(r.exclusion == doctest::Approx(default_exclusion(b, R)));
}

TEST_CASE("Hormander hypoellipticity of (1+lambda)^s") {
    auto grid = dyadic_grid(1, 1e6);
    auto r = hormander_check(bessel(-0.5), 1.0, 1.0, 3, grid);
    CHECK(r.passes);
    // p'/p = -s/(1+l), so the first constant is at most |s|
    CHECK(r.terms[0].c <= 0.5 + 1e-9);
}

TEST_CASE("kernel exponent formula") {
    CHECK(rho_kernel_exponent(2.0, 1.0, 1.0) == doctest::Approx(2.0));
    CHECK(rho_kernel_exponent(kD, 3.0, 0.5) == doctest::Approx(kD * 3.0 / 1.0));
}

TEST_CASE("Riesz potentials reject a kept zero mode") {
    EigenBasis b = eigensolve(build(Kind::Gasket, 2), BC::Neumann,
                              EigenOptions{.plain = false, .keep_zero_mode = true, .cache_dir = {}});
    CHECK_THROWS_AS(apply(riesz(1.0), b, Vec(Vec::Ones(b.rows()))), Error);
    CHECK_THROWS_AS(apply(riesz(-1.0), b, Vec(Vec::Ones(b.rows()))), Error);
    CHECK_NOTHROW(apply(lambda_symbol(), b, Vec(Vec::Ones(b.rows()))));
}
