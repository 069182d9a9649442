#include "doctest.h"

#include "fraclab/products.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace fraclab;

namespace {

const double kD = std::log(3.0) / std::log(5.0 / 3.0);

std::shared_ptr<const EigenBasis> factor(int level) {
    return std::make_shared<const EigenBasis>(eigensolve(build(Kind::Gasket, level), BC::Neumann));
}

}  // namespace

TEST_CASE("product basis enumerates every pair in order of total eigenvalue") {
    auto b1 = factor(1), b2 = factor(2);
    ProductBasis pb = product_basis(b1, b2);
    CHECK(int(pb.pairs.size()) == b1->size() * b2->size());
    for (std::size_t i = 1; i < pb.pairs.size(); ++i)
        CHECK(pb.pairs[i - 1].l1 + pb.pairs[i - 1].l2 <= pb.pairs[i].l1 + pb.pairs[i].l2);
    CHECK_THROWS_AS(product_basis(factor(3), factor(3), 100), Error);
}

TEST_CASE("coefficient transform round-trips and preserves the norm") {
    auto b = factor(2);
    ProductBasis pb = product_basis(b, b);
    Rng rng(5);
    CMat U(pb.rows1(), pb.rows2());
    for (int i = 0; i < U.rows(); ++i)
        for (int j = 0; j < U.cols(); ++j) U(i, j) = cplx(rng.normal(), rng.normal());
    // constants are outside the Neumann basis, so project first
    CMat P = pb.synthesize(pb.coefficients(U));
    CHECK((pb.synthesize(pb.coefficients(P)) - P).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(pb.norm(P) == doctest::Approx(pb.coefficients(P).norm()).epsilon(1e-12));
}

TEST_CASE("the sum symbol is the product Laplacian") {
    auto b1 = factor(2), b2 = factor(1);
    ProductBasis pb = product_basis(b1, b2);
    Rng rng(6);
    CMat U = pb.synthesize(CMat::Random(b1->size(), b2->size()));
    CMat got = apply2(parse_symbol2("sum"), pb, U);
    CMat ref = b1->laplacian().cast<cplx>() * U + U * b2->laplacian().transpose().cast<cplx>();
    CHECK((got - ref).cwiseAbs().maxCoeff() < 1e-9 * ref.cwiseAbs().maxCoeff());
}

TEST_CASE("tensor symbols act factor by factor") {
    auto b1 = factor(2), b2 = factor(2);
    ProductBasis pb = product_basis(b1, b2);
    Rng rng(7);
    Vec u1 = b1->synthesize(rng.normal_vec(b1->size())), u2 = b2->synthesize(rng.normal_vec(b2->size()));
    CMat U = (u1 * u2.transpose()).cast<cplx>();
    Symbol f = bessel(0.4), g = heat_symbol(0.01);
    CMat got = apply2(tensor_symbol(f, g), pb, U);
    CMat ref = apply(f, *b1, u1) * apply(g, *b2, u2).transpose();
    CHECK((got - ref).cwiseAbs().maxCoeff() < 1e-10 * ref.cwiseAbs().maxCoeff());
}

TEST_CASE("product kernel integrates to the operator") {
    auto b = factor(1);
    ProductBasis pb = product_basis(b, b);
    Symbol2 p = parse_symbol2("mixed");
    KernelMatrix K = kernel2(p, pb);
    CMat U = pb.synthesize(CMat::Random(b->size(), b->size()));
    CMat V = apply2(p, pb, U);
    const int r2 = pb.rows2();
    for (int x1 = 0; x1 < pb.rows1(); ++x1)
        for (int x2 = 0; x2 < r2; ++x2) {
            cplx s = 0;
            for (int y1 = 0; y1 < pb.rows1(); ++y1)
                for (int y2 = 0; y2 < r2; ++y2)
                    s += K.values(x1 * r2 + x2, y1 * r2 + y2) * U(y1, y2) * b->mass[y1] * b->mass[y2];
            CHECK(std::abs(s - V(x1, x2)) < 1e-10);
        }
}

TEST_CASE("streamed kernel file has a header and the expected size") {
    auto b = factor(1);
    ProductBasis pb = product_basis(b, b);
    auto path = std::filesystem::temp_directory_path() / "fraclab_kernel2.bin";
    write_kernel2(parse_symbol2("riesz:1"), pb, path.string());
    std::ifstream f(path, std::ios::binary);
    std::string header;
    std::getline(f, header);
    CHECK(header.front() == '{');
    auto start = f.tellg();
    f.seekg(0, std::ios::end);
    long n = pb.rows1() * pb.rows2();
    CHECK(long(f.tellg() - start) == n * n * long(sizeof(double)));
    std::filesystem::remove(path);
}

TEST_CASE("Marcinkiewicz multipliers") {
    auto grid = quadrant_grid(dyadic_grid(1, 1e5));
    for (const char* s : {"riesz:1", "riesz:2", "mixed", "one"}) {
        auto r = verify_marcinkiewicz(parse_symbol2(s), 0, 2, grid, kD);
        CHECK_MESSAGE(r.passes, s);
        CHECK(r.closed_form);
    }
    auto bad = verify_marcinkiewicz(parse_symbol2("sum"), 0, 1, grid, kD);
    CHECK(!bad.passes);
    auto ok = verify_marcinkiewicz(parse_symbol2("sum"), kD + 1, 1, grid, kD);
    CHECK(ok.passes);
}

TEST_CASE("empty cones from ratio gaps") {
    auto r = gap_cones({1, 2}, {1, 10}, 0.5);
    // ratios 0.1 0.2 1 2
    REQUIRE(r.cones.size() == 3);
    CHECK(r.cones[0].ratio_lo == doctest::Approx(0.1));
    CHECK(r.cones[0].ratio_hi == doctest::Approx(0.2));
    CHECK(r.few_pairs);
    for (const auto& c : r.cones) {
        for (double a : {1.0, 2.0})
            for (double b : {1.0, 10.0}) CHECK(!c.cone.contains(a, b));
        CHECK(c.cone.contains(c.cone.a, 1.0));
    }
}

TEST_CASE("quasi-inverse of lambda1 - a lambda2") {
    auto b = factor(2);
    ProductBasis pb = product_basis(b, b);
    QuasiInverse q = quasi_inverse_check(1.0, pb);
    CHECK(q.inf == doctest::Approx(0).epsilon(1e-12));
    CHECK(std::isinf(q.op_norm));
    auto cones = gap_cones(pb, 0.05);
    REQUIRE(!cones.cones.empty());
    double a = cones.cones.back().cone.a;
    double ref = INFINITY;
    for (const auto& p : pb.pairs) ref = std::min(ref, std::abs(p.l1 - a * p.l2) / (p.l1 + p.l2));
    CHECK(quasi_inverse_check(a, pb).inf == doctest::Approx(ref));
    CHECK(ref > 0);
}

TEST_CASE("ellipticity of 1 + lambda1 + lambda2 and its failure for lambda1 - lambda2") {
    auto e = elliptic_check(parse_symbol2("elliptic"), kD + 1, 1, 1e5, kD);
    CHECK(e.passes);
    CHECK(e.c >= 1.0);
    auto f = elliptic_check(parse_symbol2("diff:1"), kD + 1, 1, 1e5, kD);
    CHECK(!f.passes);
}

TEST_CASE("elliptic extension leaves the symbol alone away from the cone") {
    Symbol2 p = parse_symbol2("diff:2");
    ConeSpec cone{2.0, 0.3};
    Symbol2 q = elliptic_extension(p, kD + 1, cone, 1.0, kD, 1e5);
    CHECK(std::abs(q(1000, 10) - p(1000, 10)) < 1e-9 * std::abs(p(1000, 10)));
    CHECK(std::abs(q(10, 1000) - p(10, 1000)) < 1e-9 * std::abs(p(10, 1000)));
    // inside the cone the extension is bounded away from zero
    CHECK(std::abs(q(2000, 1000)) > 1.0);
}

TEST_CASE("decay of product kernels") {
    FractalGraph g = build(Kind::Gasket, 2);
    auto b = std::make_shared<const EigenBasis>(eigensolve(g, BC::Neumann));
    ProductBasis pb = product_basis(b, b);
    Mat R = resistance_matrix(g);
    auto vs = default_product_variants();
    auto r = product_decay(parse_symbol2("riesz:1"), pb, R, R, kD, vs);
    REQUIRE(r.size() == vs.size());
    for (const auto& x : r) {
        CHECK(std::isfinite(x.sup));
        CHECK(x.admissible > 0);
    }
}
