#include "doctest.h"
#include "oracles.hpp"

#include "fraclab/wavefront.hpp"

#include <algorithm>
#include <cmath>

using namespace fraclab;

namespace {

const double kD = std::log(3.0) / std::log(5.0 / 3.0);

CoeffField synthetic(const std::function<double(double, double)>& f) {
    CoeffField c;
    c.lam1.resize(30);
    c.lam2.resize(30);
    for (int i = 0; i < 30; ++i) c.lam1[i] = c.lam2[i] = std::pow(10.0, 5.0 * i / 29.0);
    c.a.resize(30, 30);
    for (int i = 0; i < 30; ++i)
        for (int j = 0; j < 30; ++j) c.a(i, j) = f(c.lam1[i], c.lam2[j]);
    return c;
}

}  // namespace

TEST_CASE("default cone classes partition the quadrant") {
    auto cs = default_cone_classes();
    REQUIRE(cs.size() == 3);
    CHECK(cs[0].lo == 0);
    CHECK(cs[0].hi == doctest::Approx(cs[1].lo));
    CHECK(cs[1].hi == doctest::Approx(cs[2].lo));
    CHECK(std::isinf(cs[2].hi));
    ConeClass c = cone_class(ConeSpec{2.0, 0.5});
    CHECK(c.lo == doctest::Approx(1.5));
    CHECK(c.hi == doctest::Approx(2.5));
}

TEST_CASE("tensor reference follows the singular supports") {
    auto cs = default_cone_classes();
    auto both = tensor_wf_reference({0}, {1}, 3, 3, cs);
    // full cone set over the product of the singular cells, axis classes over the rest
    CHECK(both == std::set<std::pair<int, int>>{{1, 0}, {1, 1}, {1, 2}, {0, 2}, {2, 2}, {4, 0}, {7, 0}});
    // u2 singular in cell 2 only, u1 smooth: y-axis class over every x-cell
    auto only2 = tensor_wf_reference({}, {2}, 3, 3, cs);
    CHECK(only2 == std::set<std::pair<int, int>>{{2, 0}, {5, 0}, {8, 0}});
    auto only1 = tensor_wf_reference({1}, {}, 3, 3, cs);
    CHECK(only1 == std::set<std::pair<int, int>>{{3, 2}, {4, 2}, {5, 2}});
    CHECK(tensor_wf_reference({}, {}, 3, 3, cs).empty());
}

TEST_CASE("decay classification of synthetic coefficient fields") {
    ConeClass mid{"middle", 1 / 3.7, 3.7};
    auto smooth = cone_decay_exponent(synthetic([](double a, double b) { return std::pow(1 + a + b, -1.5); }), mid, 1,
                                      kD);
    CHECK(smooth.verdict == Verdict::Smooth);
    CHECK(smooth.slope == doctest::Approx(-1.5).epsilon(0.05));
    auto flat = cone_decay_exponent(synthetic([](double, double) { return 1.0; }), mid, 1, kD);
    CHECK(flat.verdict == Verdict::Flag);
    CHECK(flat.slope == doctest::Approx(0).epsilon(1e-9));
    auto cut = cone_decay_exponent(synthetic([](double a, double b) { return a + b < 100 ? 1.0 : 0.0; }), mid, 1, kD);
    CHECK(cut.verdict == Verdict::Truncated);
    auto zero = cone_decay_exponent(synthetic([](double, double) { return 0.0; }), mid, 1, kD);
    CHECK(zero.verdict == Verdict::Zero);
    auto none = cone_decay_exponent(synthetic([](double, double) { return 1.0; }), ConeClass{"x", 1e9, INFINITY}, 1, kD);
    CHECK(none.verdict == Verdict::Vacuous);
}

TEST_CASE("coefficient field does not depend on the basis within eigenspaces") {
    auto b = std::make_shared<const EigenBasis>(eigensolve(build(Kind::Gasket, 2), BC::Neumann));
    ProductBasis pb = product_basis(b, b);
    Rng rng(3);
    CMat C(b->size(), b->size());
    for (int i = 0; i < C.rows(); ++i)
        for (int j = 0; j < C.cols(); ++j) C(i, j) = rng.normal();
    CoeffField f = coeff_field(pb, C);
    // rotate inside every degenerate eigenspace of the first factor
    Mat Q = Mat::Identity(b->size(), b->size());
    for (auto [lo, hi] : clusters(b->eigenvalues, cluster_tolerance(b->eigenvalues))) {
        int m = hi - lo;
        Mat G(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) G(i, j) = rng.normal();
        Q.block(lo, lo, m, m) = Eigen::HouseholderQR<Mat>(G).householderQ();
    }
    CoeffField g = coeff_field(pb, Q.cast<cplx>() * C);
    CHECK((f.a - g.a).cwiseAbs().maxCoeff() < 1e-12 * f.a.maxCoeff());
    double total = 0;
    for (int i = 0; i < f.a.rows(); ++i)
        for (int j = 0; j < f.a.cols(); ++j) total += f.a(i, j) * f.a(i, j);
    CHECK(std::sqrt(total) == doctest::Approx(C.norm()).epsilon(1e-12));
}

TEST_CASE("localized eigenfunctions are global eigenfunctions") {
    FractalGraph g = build(Kind::Gasket, 3);
    auto cell = g.cell_vertices("1");
    auto corners = g.cell_corners("1");
    std::vector<int> interior;
    for (int v : cell)
        if (std::find(corners.begin(), corners.end(), v) == corners.end()) interior.push_back(v);
    auto cl = localized_eigenfunctions(g, interior);
    REQUIRE(!cl.empty());
    Mat E = oracle::energy(g, false);
    Vec m = Eigen::Map<const Vec>(g.mass.data(), g.size());
    for (const auto& c : cl) {
        for (int k = 0; k < c.F.cols(); ++k) {
            Vec f = c.F.col(k);
            Vec res = E * f - c.lambda * m.cwiseProduct(f);
            CHECK(res.cwiseAbs().maxCoeff() < 1e-8 * c.lambda * m.maxCoeff() * f.cwiseAbs().maxCoeff());
            for (int v = 0; v < g.size(); ++v)
                if (std::find(interior.begin(), interior.end(), v) == interior.end()) CHECK(f[v] == 0);
        }
    }
}

TEST_CASE("localized series concentrates at one point") {
    FractalGraph g = build(Kind::DoubleCover, 3);
    LocalizedSeries s = localized_series(g, "a0", "12");
    CHECK(s.point >= 0);
    REQUIRE(s.terms.size() >= 2);
    for (std::size_t i = 1; i < s.terms.size(); ++i) CHECK(s.terms[i - 1].first < s.terms[i].first);
    for (const auto& [l, f] : s.terms) {
        double n2 = 0;
        for (int v = 0; v < g.size(); ++v) n2 += f[v] * f[v] * g.mass[std::size_t(v)];
        CHECK(n2 == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(f[s.point] != 0);
    }
}

TEST_CASE("cell regions and the estimate grid") {
    FractalGraph g = build(Kind::DoubleCover, 2);
    auto b = std::make_shared<const EigenBasis>(eigensolve(g, BC::None));
    ProductBasis pb = product_basis(b, b);
    auto regions = cell_regions(pb, {"a", "b"});
    REQUIRE(regions.size() == 4);
    CHECK(regions[1].name == "axb");
    CMat U = CMat::Zero(pb.rows1(), pb.rows2());
    auto grid = wf_estimate(U, pb, regions, default_cone_classes(), 1, kD);
    CHECK(grid.cells.size() == 12);
    CHECK(grid.flagged().empty());
    CHECK(grid.csv().rfind("region,cone,slope,verdict\n", 0) == 0);
}
