#include "doctest.h"
#include "oracles.hpp"

#include "fraclab/graph.hpp"

#include <cmath>
#include <set>

using namespace fraclab;

TEST_CASE("gasket vertex count follows 3(3^m+1)/2") {
    for (int m = 0; m <= 5; ++m) {
        FractalGraph g = build(Kind::Gasket, m);
        int p = 1;
        for (int k = 0; k < m; ++k) p *= 3;
        CHECK(g.size() == 3 * (p + 1) / 2);
        CHECK(g.boundary.size() == 3);
        CHECK(int(g.cells.size()) == p);
    }
}

TEST_CASE("double cover glues two copies along the boundary") {
    FractalGraph k = build(Kind::Gasket, 3);
    FractalGraph g = build(Kind::DoubleCover, 3);
    CHECK(g.size() == 2 * k.size() - 3);
    CHECK(g.cells.size() == 2 * k.cells.size());
    CHECK(g.boundary.empty());
}

TEST_CASE("every vertex degree is 4 except the three corners") {
    FractalGraph g = build(Kind::Gasket, 4);
    std::vector<int> deg(std::size_t(g.size()), 0);
    for (const auto& e : g.edges) {
        ++deg[std::size_t(e.i)];
        ++deg[std::size_t(e.j)];
    }
    for (int v = 0; v < g.size(); ++v) CHECK(deg[std::size_t(v)] == (g.is_boundary(v) ? 2 : 4));
}

TEST_CASE("mass is a probability measure") {
    for (Kind k : {Kind::Gasket, Kind::DoubleCover, Kind::Circle}) {
        FractalGraph g = build(k, k == Kind::Circle ? 17 : 3);
        double s = 0;
        for (double m : g.mass) {
            CHECK(m > 0);
            s += m;
        }
        CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("renormalized boundary resistance is 2/3 at every level") {
    for (int m = 0; m <= 4; ++m) {
        FractalGraph g = build(Kind::Gasket, m);
        CHECK(resistance(g, g.boundary[0], g.boundary[1]) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    }
}

TEST_CASE("resistance agrees with the pseudo-inverse oracle") {
    FractalGraph g = build(Kind::Gasket, 3);
    Mat R = resistance_matrix(g);
    for (auto [x, y] : {std::pair{0, 5}, std::pair{3, 40}, std::pair{7, 8}, std::pair{12, 29}}) {
        double ref = oracle::resistance(g, x, y);
        CHECK(resistance(g, x, y) == doctest::Approx(ref).epsilon(1e-11));
        CHECK(R(x, y) == doctest::Approx(ref).epsilon(1e-11));
    }
}

TEST_CASE("circle resistance is series-parallel") {
    const int n = 24;
    FractalGraph g = build(Kind::Circle, n);
    for (int k : {1, 5, 12}) {
        double a = double(k) / n, b = double(n - k) / n;
        CHECK(resistance(g, 0, k) == doctest::Approx(a * b / (a + b)).epsilon(1e-12));
    }
}

TEST_CASE("resistance is a metric") {
    FractalGraph g = build(Kind::Gasket, 2);
    Mat R = resistance_matrix(g);
    const int n = g.size();
    for (int x = 0; x < n; ++x) {
        CHECK(R(x, x) == doctest::Approx(0).epsilon(1e-14));
        for (int y = 0; y < n; ++y) {
            CHECK(R(x, y) == doctest::Approx(R(y, x)).epsilon(1e-13));
            for (int z = 0; z < n; ++z) CHECK(R(x, z) <= R(x, y) + R(y, z) + 1e-12);
        }
    }
}

TEST_CASE("measured dimension matches log 3 / log(5/3)") {
    FractalGraph g = build(Kind::Gasket, 3);
    CHECK(measured_d(g) == doctest::Approx(std::log(3.0) / std::log(5.0 / 3.0)).epsilon(1e-10));
    CHECK(measured_d(build(Kind::Circle, 32)) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("doubling ratios stay bounded") {
    FractalGraph g = build(Kind::Gasket, 3);
    Mat R = resistance_matrix(g);
    DoublingReport rep = doubling_report(g, R, 20, {0.05, 0.1, 0.2, 0.4}, 7);
    CHECK(rep.max_ratio >= 1.0);
    CHECK(rep.max_ratio < 10.0);
}

TEST_CASE("cell prefixes select nested vertex sets") {
    FractalGraph g = build(Kind::Gasket, 3);
    auto all = g.cell_vertices("");
    auto c0 = g.cell_vertices("0");
    auto c01 = g.cell_vertices("01");
    CHECK(int(all.size()) == g.size());
    CHECK(c0.size() == 15);
    CHECK(c01.size() == 6);
    std::set<int> s0(c0.begin(), c0.end());
    for (int v : c01) CHECK(s0.count(v) == 1);
}

TEST_CASE("hash and json are stable") {
    FractalGraph a = build(Kind::Gasket, 2), b = build(Kind::Gasket, 2);
    CHECK(a.hash() == b.hash());
    CHECK(a.to_json() == b.to_json());
    CHECK(a.hash() != build(Kind::Gasket, 3).hash());
}

TEST_CASE("invalid configurations are rejected") {
    CHECK_THROWS_AS(build(Kind::Gasket, -1), Error);
    CHECK_THROWS_AS(build(Kind::Circle, 2), Error);
    CHECK_THROWS_AS(build(Kind::Gasket, 9), Error);
    CHECK_THROWS_AS(parse_kind("carpet"), Error);
    FractalGraph g = build(Kind::Gasket, 1);
    CHECK_THROWS_AS(resistance(g, 0, 99), Error);
}
