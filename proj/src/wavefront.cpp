#include "fraclab/wavefront.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace fraclab {

namespace {

// cluster id of every eigen index, and the representative eigenvalue of each cluster
std::vector<int> cluster_ids(const Vec& ev, Vec& distinct) {
    auto cl = clusters(ev, cluster_tolerance(ev));
    std::vector<int> id(static_cast<std::size_t>(ev.size()));
    distinct.resize(int(cl.size()));
    for (std::size_t k = 0; k < cl.size(); ++k) {
        distinct[int(k)] = ev[cl[k].first];
        for (int i = cl[k].first; i < cl[k].second; ++i) id[std::size_t(i)] = int(k);
    }
    return id;
}

}  // namespace

CoeffField coeff_field(const ProductBasis& pb, const CMat& C) {
    CoeffField f;
    auto id1 = cluster_ids(pb.b1->eigenvalues, f.lam1);
    auto id2 = cluster_ids(pb.b2->eigenvalues, f.lam2);
    Mat s2 = Mat::Zero(f.lam1.size(), f.lam2.size());
    for (int i = 0; i < C.rows(); ++i)
        for (int j = 0; j < C.cols(); ++j) s2(id1[std::size_t(i)], id2[std::size_t(j)]) += std::norm(C(i, j));
    f.a = s2.cwiseSqrt();
    return f;
}

ConeClass cone_class(const ConeSpec& c, const std::string& name) { return {name, c.a - c.eps, c.a + c.eps}; }

std::vector<ConeClass> default_cone_classes() {
    return {{"y-axis", 0.0, 1.0 / 3.7}, {"middle", 1.0 / 3.7, 3.7}, {"x-axis", 3.7, INFINITY}};
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Smooth: return "smooth";
        case Verdict::Truncated: return "smooth-truncated";
        case Verdict::Vacuous: return "vacuously-smooth";
        case Verdict::Zero: return "zero";
        case Verdict::Flag: return "wavefront";
    }
    return "?";
}

ConeDecay cone_decay_exponent(const CoeffField& c, const ConeClass& cone, double n_max, double d, double floor) {
    ConeDecay r;
    const double mx = c.a.size() ? c.a.maxCoeff() : 0.0;
    struct Band {
        double best = 0, at = 0;
    };
    std::map<int, Band> bands;
    std::vector<double> ax, ay;
    for (int i = 0; i < c.lam1.size(); ++i)
        for (int j = 0; j < c.lam2.size(); ++j) {
            double ratio = c.lam1[i] / c.lam2[j];
            if (!(ratio > cone.lo && ratio < cone.hi)) continue;
            ++r.points;
            double s = c.lam1[i] + c.lam2[j];
            int b = int(std::floor(std::log2(1.0 + s)));
            Band& bd = bands[b];
            double v = c.a(i, j) < floor * mx ? 0.0 : c.a(i, j);
            if (v > 0) {
                ax.push_back(std::log(1.0 + s));
                ay.push_back(std::log(v));
            }
            if (v > bd.best) {
                bd.best = v;
                bd.at = s;
            }
        }
    r.sparse = r.points < 20;
    if (r.points == 0) {
        r.verdict = Verdict::Vacuous;
        return r;
    }
    if (mx == 0) {
        r.verdict = Verdict::Zero;
        return r;
    }
    if (ax.size() > 1) r.slope_all = fit_line(ax, ay).slope;
    std::vector<double> xs, ys;
    bool top = false;
    int k = 0;
    const int nb = int(bands.size());
    for (const auto& [b, bd] : bands) {
        if (bd.best > 0) {
            xs.push_back(std::log(1.0 + bd.at));
            ys.push_back(std::log(bd.best));
            if (k >= nb - 2) top = true;
        }
        ++k;
    }
    r.bands = int(xs.size());
    if (!top) {
        r.verdict = Verdict::Truncated;
        return r;
    }
    if (xs.size() > 1) {
        LineFit f = fit_line(xs, ys);
        r.slope = f.slope;
        r.residual = f.residual;
    }
    r.verdict = r.slope < -1.1 * n_max / (d + 1.0) ? Verdict::Smooth : Verdict::Flag;
    return r;
}

std::set<std::pair<int, int>> WFGrid::flagged() const {
    std::set<std::pair<int, int>> s;
    for (const auto& c : cells)
        if (c.decay.verdict == Verdict::Flag) s.insert({c.region, c.cone});
    return s;
}

std::string WFGrid::csv() const {
    std::ostringstream os;
    os << "region,cone,slope,verdict\n";
    for (const auto& c : cells)
        os << regions[std::size_t(c.region)].name << "," << cones[std::size_t(c.cone)].name << ","
           << fmt(c.decay.slope) << "," << to_string(c.decay.verdict) << "\n";
    return os.str();
}

WFGrid wf_estimate(const CMat& U, const ProductBasis& pb, const std::vector<Region>& regions,
                   const std::vector<ConeClass>& cones, double n_max, double d) {
    WFGrid g;
    g.regions = regions;
    g.cones = cones;
    const auto& B1 = *pb.b1;
    const auto& B2 = *pb.b2;
    const Mat Wre = B1.mass.asDiagonal() * U.real() * B2.mass.asDiagonal();
    const Mat Wim = B1.mass.asDiagonal() * U.imag() * B2.mass.asDiagonal();
    const bool has_im = Wim.cwiseAbs().maxCoeff() > 0;
    std::vector<std::vector<WFCell>> per(regions.size());
    parallel_for(int(regions.size()), [&](int r) {
        const auto& rg = regions[std::size_t(r)];
        const int n1 = int(rg.rows1.size()), n2 = int(rg.rows2.size());
        Mat V1(n1, B1.size()), V2(n2, B2.size());
        for (int i = 0; i < n1; ++i) V1.row(i) = B1.vectors.row(rg.rows1[std::size_t(i)]);
        for (int j = 0; j < n2; ++j) V2.row(j) = B2.vectors.row(rg.rows2[std::size_t(j)]);
        auto part = [&](const Mat& W) {
            Mat Wr(n1, n2);
            for (int i = 0; i < n1; ++i)
                for (int j = 0; j < n2; ++j) Wr(i, j) = W(rg.rows1[std::size_t(i)], rg.rows2[std::size_t(j)]);
            return Mat(V1.transpose() * (Wr * V2));
        };
        CMat C = part(Wre).cast<cplx>();
        if (has_im) C.imag() = part(Wim);
        CoeffField f = coeff_field(pb, C);
        for (std::size_t k = 0; k < cones.size(); ++k)
            per[std::size_t(r)].push_back({r, int(k), cone_decay_exponent(f, cones[k], n_max, d)});
    });
    for (auto& v : per)
        for (auto& c : v) g.cells.push_back(c);
    return g;
}

std::vector<Region> cell_regions(const ProductBasis& pb, const std::vector<std::string>& prefixes) {
    auto rows_of = [](const EigenBasis& b, const std::string& prefix) {
        std::vector<int> inv(static_cast<std::size_t>(b.graph->size()), -1);
        for (int i = 0; i < b.rows(); ++i) inv[std::size_t(b.active[std::size_t(i)])] = i;
        std::vector<int> rows;
        for (int v : b.graph->cell_vertices(prefix))
            if (inv[std::size_t(v)] >= 0) rows.push_back(inv[std::size_t(v)]);
        return rows;
    };
    std::vector<Region> out;
    for (const auto& p1 : prefixes)
        for (const auto& p2 : prefixes) out.push_back({p1 + "x" + p2, rows_of(*pb.b1, p1), rows_of(*pb.b2, p2)});
    return out;
}

std::set<std::pair<int, int>> tensor_wf_reference(const std::set<int>& sing1, const std::set<int>& sing2, int ncells1,
                                                  int ncells2, const std::vector<ConeClass>& cones) {
    std::set<std::pair<int, int>> out;
    auto find = [&](const std::string& name) {
        for (std::size_t k = 0; k < cones.size(); ++k)
            if (cones[k].name == name) return int(k);
        config_error("tensor_wf_reference: cone class '" + name + "' missing");
    };
    const int yk = find("y-axis"), xk = find("x-axis");
    for (int c1 = 0; c1 < ncells1; ++c1)
        for (int c2 = 0; c2 < ncells2; ++c2) {
            int r = c1 * ncells2 + c2;
            bool a = sing1.count(c1) > 0, b = sing2.count(c2) > 0;
            if (a && b)
                for (int k = 0; k < int(cones.size()); ++k) out.insert({r, k});
            else if (b)
                out.insert({r, yk});
            else if (a)
                out.insert({r, xk});
        }
    return out;
}

std::vector<LocalizedCluster> localized_eigenfunctions(const FractalGraph& g, const std::vector<int>& interior) {
    const int N = g.size();
    const int s = int(interior.size());
    Mat E = g.energy();
    std::vector<char> in(static_cast<std::size_t>(N), 0);
    for (int v : interior) in[std::size_t(v)] = 1;
    std::vector<int> outs;
    for (int v = 0; v < N; ++v)
        if (!in[std::size_t(v)]) outs.push_back(v);
    Mat A(s, s), Bd(int(outs.size()), s);
    Vec sc(s);
    for (int i = 0; i < s; ++i) {
        sc[i] = 1.0 / std::sqrt(g.mass[std::size_t(interior[std::size_t(i)])]);
        for (int j = 0; j < s; ++j) A(i, j) = E(interior[std::size_t(i)], interior[std::size_t(j)]);
        for (std::size_t o = 0; o < outs.size(); ++o) Bd(int(o), i) = E(outs[o], interior[std::size_t(i)]);
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(sc.asDiagonal() * A * sc.asDiagonal());
    Vec mu = es.eigenvalues();
    Mat W = sc.asDiagonal() * es.eigenvectors();
    const double btol = 1e-9 * Bd.cwiseAbs().maxCoeff();
    std::vector<LocalizedCluster> out;
    for (auto [lo, hi] : clusters(mu, 1e-9 * std::max(1.0, mu.cwiseAbs().maxCoeff()))) {
        Mat Wc = W.middleCols(lo, hi - lo);
        Mat Z = Bd * Wc;
        Eigen::JacobiSVD<Mat> svd(Z, Eigen::ComputeFullV);
        int r = 0;
        for (int k = 0; k < svd.singularValues().size(); ++k)
            if (svd.singularValues()[k] > btol) ++r;
        int dim = int(Wc.cols()) - r;
        if (dim <= 0) continue;
        Mat ns = svd.matrixV().rightCols(dim);
        Mat loc = Wc * ns;
        LocalizedCluster c;
        c.lambda = mu[lo];
        c.F = Mat::Zero(N, dim);
        for (int i = 0; i < s; ++i) c.F.row(interior[std::size_t(i)]) = loc.row(i);
        out.push_back(std::move(c));
    }
    return out;
}

namespace {

std::vector<int> interior_of(const FractalGraph& g, const std::string& prefix) {
    auto vs = g.cell_vertices(prefix);
    auto cs = g.cell_corners(prefix);
    std::vector<int> out;
    for (int v : vs)
        if (std::find(cs.begin(), cs.end(), v) == cs.end()) out.push_back(v);
    return out;
}

}  // namespace

LocalizedSeries localized_series(const FractalGraph& g, const std::string& prefix, const std::string& nested) {
    const int depth = g.level - 1;  // nested cells prefix + nested[:k], k < depth
    if (depth < 1) config_error("localized_series: level too small");
    std::map<long long, std::pair<double, Mat>> got;
    std::string innermost = prefix;
    for (int k = 0; k < depth && k <= int(nested.size()); ++k) {
        std::string pre = prefix + nested.substr(0, std::size_t(k));
        innermost = pre;
        for (auto& c : localized_eigenfunctions(g, interior_of(g, pre)))
            got[std::llround(c.lambda * 1e6)] = {c.lambda, c.F};
    }
    LocalizedSeries s;
    auto inner = interior_of(g, innermost);
    if (inner.empty()) config_error("localized_series: innermost cell has no interior vertex");
    s.point = inner.front();
    const int x = s.point;
    for (auto& [key, lf] : got) {
        const Mat& B = lf.second;
        Vec v = B.row(x).cwiseAbs().maxCoeff() > 1e-12 ? Vec(B * B.row(x).transpose()) : Vec(B.col(0));
        double nrm = 0;
        for (int i = 0; i < v.size(); ++i) nrm += g.mass[std::size_t(i)] * v[i] * v[i];
        s.terms.push_back({lf.first, v / std::sqrt(nrm)});
    }
    return s;
}

bool WavefrontPanel::passes() const {
    for (const auto& c : cases)
        if (!c.match || !c.monotone || !c.elliptic_equal || !c.scaling_equal) return false;
    return localized_flags == localized_expected && smooth_flags == 0;
}

WavefrontPanel wavefront_panel(int level, double n_max, const std::string& cache_dir) {
    WavefrontPanel P;
    P.level = level;
    P.n_max = n_max;
    auto g = std::make_shared<const FractalGraph>(build(Kind::DoubleCover, level));
    P.d = measured_d(*g);
    EigenOptions eo;
    eo.cache_dir = cache_dir;
    auto b = std::make_shared<const EigenBasis>(eigensolve(g, BC::None, eo));
    ProductBasis pb = product_basis(b, b, 4000000);
    const std::vector<std::string> prefixes = {"a0", "a1", "a2", "b0", "b1", "b2"};
    const int nc = int(prefixes.size());
    auto regions = cell_regions(pb, prefixes);
    auto cones = default_cone_classes();

    std::vector<LocalizedSeries> fam;
    for (const auto& p : prefixes) fam.push_back(localized_series(*g, p, "1201"));
    for (const auto& t : fam[0].terms) P.series_eigenvalues.push_back(t.first);

    auto profile = [&](const std::set<int>& sing) {
        Vec u = Vec::Zero(g->size());
        for (int c = 0; c < nc; ++c) {
            if (sing.count(c))
                for (const auto& t : fam[std::size_t(c)].terms) u += t.second;
            else
                u += fam[std::size_t(c)].terms.front().second;
        }
        return b->restrict(u);
    };
    auto flags = [&](const CMat& U) { return wf_estimate(U, pb, regions, cones, n_max, P.d).flagged(); };

    std::vector<std::pair<std::string, Symbol2>> s0 = {
        {"riesz:1", parse_symbol2("riesz:1")},
        {"(1+l1+l2)^(2i)", parse_symbol2("(1+l1+l2)^(2i)")},
        {"(1+l2)/(1+l1+l2)", parse_symbol2("(1+l2)/(1+l1+l2)")}};
    for (const auto& s : s0) P.monotone_symbols.push_back(s.first);
    Symbol2 ell = parse_symbol2("elliptic");

    const std::vector<std::pair<std::set<int>, std::set<int>>> panel = {{{0}, {}}, {{}, {3}}, {{0}, {3}}};
    for (const auto& [s1, s2] : panel) {
        PanelCase pc;
        pc.sing1 = s1;
        pc.sing2 = s2;
        CMat U = (profile(s1) * profile(s2).transpose()).cast<cplx>();
        auto F = flags(U);
        auto R = tensor_wf_reference(s1, s2, nc, nc, cones);
        pc.flagged = int(F.size());
        pc.expected = int(R.size());
        pc.match = F == R;
        for (const auto& [name, p] : s0) {
            auto F2 = flags(apply2(p, pb, U));
            if (!std::includes(F.begin(), F.end(), F2.begin(), F2.end())) pc.monotone = false;
        }
        pc.elliptic_equal = flags(apply2(ell, pb, U)) == F;
        pc.scaling_equal = flags(U * cplx(-2.5, 1.0)) == F;
        P.cases.push_back(pc);
    }

    // coefficients equal to one on the middle cone, localized at the series points of cells 0 and 3
    const ConeClass& mid = cones[1];
    CMat U = CMat::Zero(b->rows(), b->rows());
    for (const auto& [l1, v1] : fam[0].terms)
        for (const auto& [l2, v2] : fam[3].terms)
            if (l1 / l2 > mid.lo && l1 / l2 < mid.hi) U += (b->restrict(v1) * b->restrict(v2).transpose()).cast<cplx>();
    P.localized_flags = flags(U);
    P.localized_expected = {{0 * nc + 3, 1}};

    Vec u1 = b->vectors.col(0) + 0.5 * b->vectors.col(3), u2 = b->vectors.col(1) - b->vectors.col(7);
    P.smooth_flags = int(flags((u1 * u2.transpose()).cast<cplx>()).size());
    return P;
}

}  // namespace fraclab
