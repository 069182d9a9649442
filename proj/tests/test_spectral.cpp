#include "doctest.h"
#include "oracles.hpp"

#include "fraclab/spectral.hpp"

#include <cmath>
#include <filesystem>

using namespace fraclab;

TEST_CASE("level-1 plain Dirichlet spectrum is {2, 5, 5}") {
    EigenOptions o;
    o.plain = true;
    EigenBasis b = eigensolve(build(Kind::Gasket, 1), BC::Dirichlet, o);
    REQUIRE(b.size() == 3);
    CHECK(b.eigenvalues[0] == doctest::Approx(2).epsilon(1e-14));
    CHECK(b.eigenvalues[1] == doctest::Approx(5).epsilon(1e-14));
    CHECK(b.eigenvalues[2] == doctest::Approx(5).epsilon(1e-14));
}

TEST_CASE("plain circle spectrum is 2 - 2cos(2 pi k/n)") {
    const int n = 12;
    EigenOptions o;
    o.plain = true;
    o.keep_zero_mode = true;
    EigenBasis b = eigensolve(build(Kind::Circle, n), BC::None, o);
    std::vector<double> ref;
    for (int k = 0; k < n; ++k) ref.push_back(2 - 2 * std::cos(2 * M_PI * k / n));
    std::sort(ref.begin(), ref.end());
    REQUIRE(b.size() == n);
    for (int k = 0; k < n; ++k) CHECK(b.eigenvalues[k] == doctest::Approx(ref[std::size_t(k)]).epsilon(1e-13));
}

TEST_CASE("decimation matches a dense solve") {
    for (int m = 1; m <= 3; ++m) {
        DecimationResult r = decimation_spectrum(m);
        FractalGraph g = build(Kind::Gasket, m);
        Vec ref = oracle::spectrum(g, oracle::interior(g), true);
        REQUIRE(int(r.values.size()) == ref.size());
        for (int i = 0; i < ref.size(); ++i)
            CHECK(r.values[std::size_t(i)] == doctest::Approx(ref[i]).epsilon(1e-11));
    }
}

TEST_CASE("measure-weighted spectrum matches a dense solve") {
    FractalGraph g = build(Kind::Gasket, 3);
    EigenBasis b = eigensolve(g, BC::Dirichlet);
    Vec ref = oracle::spectrum(g, oracle::interior(g), false);
    REQUIRE(b.size() == ref.size());
    for (int i = 0; i < ref.size(); ++i) CHECK(b.eigenvalues[i] == doctest::Approx(ref[i]).epsilon(1e-11));
}

TEST_CASE("eigenvectors are measure-orthonormal and solve the pencil") {
    for (BC bc : {BC::Dirichlet, BC::Neumann}) {
        EigenBasis b = eigensolve(build(Kind::Gasket, 3), bc);
        Mat G = b.vectors.transpose() * b.mass.asDiagonal() * b.vectors;
        CHECK((G - Mat::Identity(b.size(), b.size())).cwiseAbs().maxCoeff() < 1e-12);
        Mat res = b.energy() * b.vectors - b.mass.asDiagonal() * b.vectors * b.eigenvalues.asDiagonal();
        CHECK(res.cwiseAbs().maxCoeff() < 1e-9 * b.eigenvalues.maxCoeff());
    }
}

TEST_CASE("Neumann drops the zero mode unless asked to keep it") {
    FractalGraph g = build(Kind::Gasket, 2);
    EigenBasis b = eigensolve(g, BC::Neumann);
    CHECK(b.size() == g.size() - 1);
    CHECK(b.eigenvalues[0] > 1);
    EigenOptions o;
    o.keep_zero_mode = true;
    EigenBasis k = eigensolve(g, BC::Neumann, o);
    CHECK(k.size() == g.size());
    CHECK(std::abs(k.eigenvalues[0]) < 1e-10);
}

TEST_CASE("coefficients and synthesis are inverse on a complete basis") {
    EigenBasis b = eigensolve(build(Kind::Gasket, 3), BC::Dirichlet);
    Rng rng(3);
    Vec u = rng.normal_vec(b.rows());
    CHECK((b.synthesize(b.coefficients(u)) - u).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(b.coefficients(u).norm() == doctest::Approx(b.norm(u)).epsilon(1e-12));
}

TEST_CASE("solution is deterministic and cached bases round-trip") {
    auto dir = std::filesystem::temp_directory_path() / "fraclab_spectral_cache";
    std::filesystem::remove_all(dir);
    EigenOptions o;
    o.cache_dir = dir.string();
    FractalGraph g = build(Kind::Gasket, 3);
    EigenBasis a = eigensolve(g, BC::Neumann, o);
    EigenBasis c = eigensolve(g, BC::Neumann, o);
    EigenBasis d = eigensolve(g, BC::Neumann);
    CHECK(a.hash() == c.hash());
    CHECK(a.hash() == d.hash());
    CHECK(a.vectors == c.vectors);
    std::filesystem::remove_all(dir);
}

TEST_CASE("renormalized eigenvalues converge along branches") {
    RenormReport r = renormalized_limits({2, 3, 4}, BC::Dirichlet, 3);
    CHECK(r.branches.size() == 3);
    for (const auto& br : r.branches) {
        CHECK(br.scaled.size() == 3);
        CHECK(br.cauchy);
    }
}

TEST_CASE("gaps of the ratio set") {
    auto gaps = spectral_gaps({1, 2, 10}, 0.5);
    // ratios 2, 5, 10 after 1
    REQUIRE(gaps.size() == 3);
    CHECK(gaps[0].alpha == doctest::Approx(1));
    CHECK(gaps[0].beta == doctest::Approx(2));
    CHECK(gaps[1].relative_width == doctest::Approx(1.5));
    CHECK(gaps[2].beta == doctest::Approx(10));
    CHECK(spectral_gaps({1, 2, 10}, 2.0).empty());
}

TEST_CASE("Weyl fit recovers a power law") {
    Vec ev(400);
    for (int k = 0; k < 400; ++k) ev[k] = double(k + 1) * (k + 1);
    WeylFit f = weyl_fit(ev, 100, 100000);
    CHECK(f.exponent == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("bad boundary conditions are rejected") {
    CHECK_THROWS_AS(parse_bc("robin"), Error);
    CHECK_THROWS_AS(eigensolve(build(Kind::Circle, 8), BC::Dirichlet), Error);
}
