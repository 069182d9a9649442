#include "fraclab/products.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

namespace fraclab {

CMat ProductBasis::coefficients(const CMat& U) const {
    CMat W = b1->mass.cast<cplx>().asDiagonal() * U * b2->mass.cast<cplx>().asDiagonal();
    return b1->vectors.transpose().cast<cplx>() * W * b2->vectors.cast<cplx>();
}

CMat ProductBasis::synthesize(const CMat& C) const {
    return b1->vectors.cast<cplx>() * C * b2->vectors.transpose().cast<cplx>();
}

double ProductBasis::inner(const CMat& U, const CMat& W) const {
    double s = 0;
    for (int i = 0; i < U.rows(); ++i)
        for (int j = 0; j < U.cols(); ++j) s += (std::conj(U(i, j)) * W(i, j)).real() * b1->mass[i] * b2->mass[j];
    return s;
}

double ProductBasis::norm(const CMat& U) const { return std::sqrt(inner(U, U)); }

ProductBasis product_basis(std::shared_ptr<const EigenBasis> b1, std::shared_ptr<const EigenBasis> b2, long cap) {
    if (!b1 || !b2) config_error("product_basis: missing factor basis");
    long count = long(b1->size()) * long(b2->size());
    if (count > cap)
        config_error("product_basis: " + std::to_string(count) + " pairs exceed the cap of " + std::to_string(cap));
    ProductBasis pb;
    pb.b1 = b1;
    pb.b2 = b2;
    pb.pairs.reserve(std::size_t(count));
    for (int i = 0; i < b1->size(); ++i)
        for (int j = 0; j < b2->size(); ++j) pb.pairs.push_back({i, j, b1->eigenvalues[i], b2->eigenvalues[j]});
    std::stable_sort(pb.pairs.begin(), pb.pairs.end(),
                     [](const ProductBasis::Pair& a, const ProductBasis::Pair& b) { return a.l1 + a.l2 < b.l1 + b.l2; });
    return pb;
}

MarcinkiewiczReport verify_marcinkiewicz(const Symbol2& p, double m, int alpha_max,
                                         const std::vector<std::pair<double, double>>& grid, double d) {
    if (alpha_max < 0 || alpha_max > 3) config_error("verify_marcinkiewicz: alpha_max must be in [0, 3]");
    MarcinkiewiczReport r;
    r.m = m;
    r.d = d;
    r.alpha_max = alpha_max;
    r.closed_form = bool(p.jet);
    std::map<std::pair<int, int>, std::map<int, std::vector<double>>> per;
    std::map<std::pair<int, int>, MarcinkiewiczTerm> best;
    int ray = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        auto [l1, l2] = grid[i];
        if (i > 0 && l1 + l2 < grid[i - 1].first + grid[i - 1].second) ++ray;
        Taylor t = p.expand(l1, l2, 2 * alpha_max);
        double w = std::pow(1.0 + l1 + l2, -m / (d + 1.0));
        for (int a1 = 0; a1 <= alpha_max; ++a1)
            for (int a2 = 0; a2 <= alpha_max; ++a2) {
                double v = std::pow(l1, a1) * std::pow(l2, a2) * std::abs(t.derivative(a1, a2)) * w;
                auto& b = best[{a1, a2}];
                b.a1 = a1;
                b.a2 = a2;
                if (!std::isfinite(v)) {
                    r.finite = false;
                    continue;
                }
                per[{a1, a2}][ray].push_back(v);
                if (v > b.C) {
                    b.C = v;
                    b.at1 = l1;
                    b.at2 = l2;
                }
            }
    }
    for (auto& [key, t] : best) {
        for (const auto& [k, v] : per[key]) t.stable = t.stable && tail_stable(v);
        r.stable = r.stable && t.stable;
        r.terms.push_back(t);
    }
    r.passes = r.finite && r.stable;
    return r;
}

CMat symbol_values(const Symbol2& p, const ProductBasis& pb) {
    const auto& e1 = pb.b1->eigenvalues;
    const auto& e2 = pb.b2->eigenvalues;
    CMat P(e1.size(), e2.size());
    int bad = 0;
    double w1 = 0, w2 = 0;
    for (int i = 0; i < e1.size(); ++i)
        for (int j = 0; j < e2.size(); ++j) {
            if (p.needs_nonzero && e1[i] + e2[j] <= 1e-12)
                config_error("product symbol " + p.name + " is undefined at the zero eigenvalue pair");
            P(i, j) = p(e1[i], e2[j]);
            if (!std::isfinite(P(i, j).real()) || !std::isfinite(P(i, j).imag())) {
                if (!bad) {
                    w1 = e1[i];
                    w2 = e2[j];
                }
                ++bad;
            }
        }
    if (bad)
        numeric_error("product symbol " + p.name + " is undefined at " + std::to_string(bad) + " eigenvalue pairs, e.g. (" +
                      fmt(w1) + ", " + fmt(w2) + ")");
    return P;
}

CMat apply2(const Symbol2& p, const ProductBasis& pb, const CMat& U) {
    CMat C = pb.coefficients(U);
    return pb.synthesize(C.cwiseProduct(symbol_values(p, pb)));
}

namespace {

// K2(x2, y2) = sum_n2 z(n2) phi(x2) phi(y2) for z = sum_n1 phi(x1) phi(y1) P(n1, .)
CMat block(const CMat& P, const Mat& V1, const Mat& V2, int x1, int y1) {
    Vec a = V1.row(x1).cwiseProduct(V1.row(y1)).transpose();
    CVec z = P.transpose() * a.cast<cplx>();
    Mat re = V2 * z.real().asDiagonal() * V2.transpose();
    bool complex = z.imag().cwiseAbs().maxCoeff() > 0;
    CMat K(re.rows(), re.cols());
    K.real() = re;
    if (complex)
        K.imag() = V2 * z.imag().asDiagonal() * V2.transpose();
    else
        K.imag().setZero();
    return K;
}

}  // namespace

KernelMatrix kernel2(const Symbol2& p, const ProductBasis& pb, int max_rows) {
    const int r1 = pb.rows1(), r2 = pb.rows2();
    if (long(r1) * r2 > max_rows)
        config_error("kernel2: " + std::to_string(long(r1) * r2) + " product vertices; use the streamed kernel");
    KernelMatrix K;
    K.symbol = p.name;
    K.basis_hash = pb.b1->hash() ^ (pb.b2->hash() * 1099511628211ULL);
    K.values.resize(r1 * r2, r1 * r2);
    CMat P = symbol_values(p, pb);
    parallel_for(r1, [&](int x1) {
        for (int y1 = 0; y1 < r1; ++y1) K.values.block(x1 * r2, y1 * r2, r2, r2) = block(P, pb.b1->vectors, pb.b2->vectors, x1, y1);
    });
    return K;
}

void write_kernel2(const Symbol2& p, const ProductBasis& pb, const std::string& path) {
    const int r1 = pb.rows1(), r2 = pb.rows2();
    CMat P = symbol_values(p, pb);
    bool complex = P.imag().cwiseAbs().maxCoeff() > 0;
    std::ofstream f(path, std::ios::binary);
    if (!f) config_error("write_kernel2: cannot open " + path);
    nlohmann::ordered_json h;
    h["format"] = "fraclab-kernel2";
    h["symbol"] = p.name;
    h["rows1"] = r1;
    h["rows2"] = r2;
    h["complex"] = complex;
    h["basis1"] = hex64(pb.b1->hash());
    h["basis2"] = hex64(pb.b2->hash());
    h["layout"] = "blocks (x1, y1) row-major; each rows2 x rows2 row-major float64";
    f << h.dump() << "\n";
    std::vector<double> buf;
    for (int x1 = 0; x1 < r1; ++x1)
        for (int y1 = 0; y1 < r1; ++y1) {
            CMat K = block(P, pb.b1->vectors, pb.b2->vectors, x1, y1);
            buf.clear();
            for (int i = 0; i < r2; ++i)
                for (int j = 0; j < r2; ++j) {
                    buf.push_back(K(i, j).real());
                    if (complex) buf.push_back(K(i, j).imag());
                }
            f.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(buf.size() * sizeof(double)));
        }
    if (!f) numeric_error("write_kernel2: write failed for " + path);
}

std::vector<ProductVariant> default_product_variants() {
    return {{"0", 0, 0}, {"x1", 1, 0}, {"x1y2", 1, 1}, {"x1y1", 2, 0}};
}

std::vector<ProductDecay> product_decay(const Symbol2& p, const ProductBasis& pb, const Mat& R1, const Mat& R2,
                                        double d, const std::vector<ProductVariant>& variants, double exclusion1,
                                        double exclusion2) {
    const auto& B1 = *pb.b1;
    const auto& B2 = *pb.b2;
    const int r1 = B1.rows(), r2 = B2.rows();
    double e1 = exclusion1 >= 0 ? exclusion1 : default_exclusion(B1, R1);
    double e2 = exclusion2 >= 0 ? exclusion2 : default_exclusion(B2, R2);
    CMat P0 = symbol_values(p, pb);
    std::vector<CMat> Ps;
    for (const auto& v : variants) {
        CMat P = P0;
        for (int i = 0; i < P.rows(); ++i)
            for (int j = 0; j < P.cols(); ++j) P(i, j) *= std::pow(B1.eigenvalues[i], v.f1) * std::pow(B2.eigenvalues[j], v.f2);
        Ps.push_back(P);
    }
    Mat r1m(r1, r1), r2m(r2, r2);
    for (int i = 0; i < r1; ++i)
        for (int j = 0; j < r1; ++j) r1m(i, j) = R1(B1.active[std::size_t(i)], B1.active[std::size_t(j)]);
    for (int i = 0; i < r2; ++i)
        for (int j = 0; j < r2; ++j) r2m(i, j) = R2(B2.active[std::size_t(i)], B2.active[std::size_t(j)]);
    const std::size_t nv = variants.size();
    std::vector<std::vector<ProductDecay>> local(static_cast<std::size_t>(r1), std::vector<ProductDecay>(nv));
    // K(y1, x1) is the transpose of K(x1, y1) and R is symmetric, so y1 > x1 suffices
    parallel_for(r1, [&](int x1) {
        auto& loc = local[std::size_t(x1)];
        for (int y1 = x1 + 1; y1 < r1; ++y1) {
            if (r1m(x1, y1) < e1) continue;
            for (std::size_t v = 0; v < nv; ++v) {
                CMat K = block(Ps[v], B1.vectors, B2.vectors, x1, y1);
                double w1 = std::pow(r1m(x1, y1), d + variants[v].f1 * (d + 1.0));
                for (int x2 = 0; x2 < r2; ++x2)
                    for (int y2 = 0; y2 < r2; ++y2) {
                        if (x2 == y2 || r2m(x2, y2) < e2) continue;
                        if (v == 0) ++loc[v].admissible;
                        double val = std::abs(K(x2, y2)) * w1 * std::pow(r2m(x2, y2), d + variants[v].f2 * (d + 1.0));
                        if (val > loc[v].sup) {
                            loc[v].sup = val;
                            loc[v].x1 = x1;
                            loc[v].y1 = y1;
                            loc[v].x2 = x2;
                            loc[v].y2 = y2;
                        }
                    }
            }
        }
    });
    std::vector<ProductDecay> out(nv);
    for (std::size_t v = 0; v < nv; ++v) {
        out[v].variant = variants[v].name;
        out[v].exclusion1 = e1;
        out[v].exclusion2 = e2;
        long adm = 0;
        for (int x1 = 0; x1 < r1; ++x1) {
            const auto& l = local[std::size_t(x1)][v];
            adm += local[std::size_t(x1)][0].admissible;
            if (l.sup > out[v].sup) {
                out[v].sup = l.sup;
                out[v].x1 = B1.active[std::size_t(l.x1)];
                out[v].y1 = B1.active[std::size_t(l.y1)];
                out[v].x2 = B2.active[std::size_t(l.x2)];
                out[v].y2 = B2.active[std::size_t(l.y2)];
                out[v].r1 = r1m(l.x1, l.y1);
                out[v].r2 = r2m(l.x2, l.y2);
            }
        }
        out[v].admissible = 2 * adm;
        if (adm == 0) config_error("product_decay: no vertex pair is admissible in both factors at these levels");
    }
    return out;
}

namespace {

std::vector<double> distinct_positive(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::vector<double> d;
    for (double x : v)
        if (x > 0 && (d.empty() || x - d.back() > 1e-9 * std::max(1.0, x))) d.push_back(x);
    return d;
}

}  // namespace

GapConeReport gap_cones(const std::vector<double>& spec1, const std::vector<double>& spec2, double min_width) {
    GapConeReport rep;
    rep.pairs = long(spec1.size()) * long(spec2.size());
    rep.few_pairs = rep.pairs < 100;
    auto d1 = distinct_positive(spec1), d2 = distinct_positive(spec2);
    std::vector<double> ratios;
    for (double a : d1)
        for (double b : d2) ratios.push_back(a / b);
    std::sort(ratios.begin(), ratios.end());
    for (std::size_t i = 1; i < ratios.size(); ++i) {
        double lo = ratios[i - 1], hi = ratios[i];
        if (hi - lo <= 1e-12 * hi) continue;
        double rel = (hi - lo) / lo;
        if (rel < min_width) continue;
        GapCone g;
        g.ratio_lo = lo;
        g.ratio_hi = hi;
        g.relative_width = rel;
        g.cone.a = 0.5 * (lo + hi);
        g.cone.eps = 0.5 * (hi - lo) * (1 - 1e-9);
        rep.cones.push_back(g);
    }
    return rep;
}

GapConeReport gap_cones(const ProductBasis& pb, double min_width) {
    std::vector<double> a(pb.b1->eigenvalues.data(), pb.b1->eigenvalues.data() + pb.b1->size());
    std::vector<double> b(pb.b2->eigenvalues.data(), pb.b2->eigenvalues.data() + pb.b2->size());
    GapConeReport r = gap_cones(a, b, min_width);
    r.pairs = long(pb.pairs.size());
    r.few_pairs = r.pairs < 100;
    return r;
}

namespace {

struct Probe {
    double c = INFINITY, at1 = 0, at2 = 0;
    long points = 0;
    void take(const Symbol2& p, double r, double s, double m, double d) {
        double l1 = r * s, l2 = r * (1 - s);
        double v = std::abs(p(l1, l2)) * std::pow(r, -m / (d + 1.0));
        ++points;
        if (!(v >= c)) {
            c = std::isnan(v) ? 0.0 : v;
            at1 = l1;
            at2 = l2;
        }
    }
};

}  // namespace

EllipticReport elliptic_check(const Symbol2& p, double m, double A, double r_max, double d, int radii, int angles) {
    if (!(A > 0) || !(r_max > A)) config_error("elliptic_check: needs 0 < A < r_max");
    Probe pr;
    for (int k = 0; k < radii; ++k) {
        double r = A * std::pow(r_max / A, double(k) / (radii - 1));
        std::vector<double> vals;
        for (int j = 0; j < angles; ++j) {
            double s = double(j) / (angles - 1);
            pr.take(p, r, s, m, d);
            vals.push_back(std::abs(p(r * s, r * (1 - s))));
        }
        // refine around the smallest sample on this circle
        int j = int(std::min_element(vals.begin(), vals.end()) - vals.begin());
        double lo = double(std::max(0, j - 1)) / (angles - 1), hi = double(std::min(angles - 1, j + 1)) / (angles - 1);
        for (int it = 0; it < 80; ++it) {
            double a = lo + (hi - lo) * 0.381966, b = hi - (hi - lo) * 0.381966;
            if (std::abs(p(r * a, r * (1 - a))) < std::abs(p(r * b, r * (1 - b))))
                hi = b;
            else
                lo = a;
        }
        pr.take(p, r, 0.5 * (lo + hi), m, d);
    }
    EllipticReport rep;
    rep.c = pr.c;
    rep.at1 = pr.at1;
    rep.at2 = pr.at2;
    rep.points = pr.points;
    rep.passes = rep.c > 1e-8;
    return rep;
}

EllipticReport elliptic_on_spectrum(const Symbol2& p, double m, double A, const ProductBasis& pb, double d) {
    EllipticReport rep;
    rep.c = INFINITY;
    for (const auto& pr : pb.pairs) {
        double r = pr.l1 + pr.l2;
        if (r < A) continue;
        double v = std::abs(p(pr.l1, pr.l2)) * std::pow(r, -m / (d + 1.0));
        ++rep.points;
        if (v < rep.c) {
            rep.c = v;
            rep.at1 = pr.l1;
            rep.at2 = pr.l2;
        }
    }
    if (rep.points == 0) rep.c = 0;
    rep.passes = rep.c > 1e-8;
    return rep;
}

Symbol2 elliptic_extension(const Symbol2& p, double m, const ConeSpec& cone, double A, double d, double r_max) {
    if (!(cone.eps > 0) || !(cone.eps < cone.a)) config_error("elliptic_extension: cone needs 0 < eps < a");
    const double th_lo = std::atan(cone.a - cone.eps), th_hi = std::atan(cone.a + cone.eps);
    const double th_c = 0.5 * (th_lo + th_hi), h = 0.5 * (th_hi - th_lo);
    // hypotheses: elliptic off the cone, nonvanishing on the transition band |theta - th_c| in [h/2, h]
    {
        double c = INFINITY, w1 = 0, w2 = 0;
        for (int k = 0; k < 48; ++k) {
            double r = A * std::pow(std::max(r_max, 2 * A) / A, k / 47.0);
            for (int j = 0; j <= 400; ++j) {
                double th = M_PI_2 * j / 400.0;
                if (std::abs(th - th_c) < h / 2) continue;
                double l1 = r * std::sin(th) / (std::sin(th) + std::cos(th)), l2 = r - l1;
                double v = std::abs(p(l1, l2)) * std::pow(r, -m / (d + 1.0));
                if (!(v >= c)) {
                    c = v;
                    w1 = l1;
                    w2 = l2;
                }
            }
        }
        if (!(c > 1e-8))
            check_error("elliptic_extension: symbol is not elliptic outside the cone core; witness (" + fmt(w1) + ", " +
                        fmt(w2) + ")");
    }
    auto f = p.eval;
    Symbol2 q;
    q.name = p.name + "~ext(" + fmt(cone.a) + "," + fmt(cone.eps) + ")";
    q.order_exponent = p.order_exponent;
    q.real = false;
    q.needs_nonzero = p.needs_nonzero;
    q.eval = [f, th_lo, th_hi, th_c, h](double l1, double l2) -> cplx {
        double r = l1 + l2;
        if (!(r > 0)) return f(l1, l2);
        double th = std::atan2(l1, l2);
        double chi = lp_eta(2.0 * std::abs(th - th_c) / h);
        if (chi == 0) return f(l1, l2);
        // p on the cone edges at the same |lambda|
        auto edge = [&](double t) {
            double s = std::sin(t) + std::cos(t);
            return f(r * std::sin(t) / s, r * std::cos(t) / s);
        };
        cplx pl = edge(th_lo), ph = edge(th_hi);
        double w = 1.0 - lp_eta(1.0 + (th - th_lo) / (th_hi - th_lo));
        double dphase = std::arg(ph) - std::arg(pl);
        while (dphase > M_PI) dphase -= 2 * M_PI;
        while (dphase <= -M_PI) dphase += 2 * M_PI;
        cplx lq(std::log(std::abs(pl)) * (1 - w) + std::log(std::abs(ph)) * w, std::arg(pl) + w * dphase);
        if (chi == 1) return std::exp(lq);
        cplx v = f(l1, l2);
        // continuous log of p on the band, matched to the interpolant's branch
        cplx lp(std::log(std::abs(v)), std::arg(v));
        double k = std::round((lq.imag() - lp.imag()) / (2 * M_PI));
        lp.imag(lp.imag() + 2 * M_PI * k);
        return std::exp((1 - chi) * lp + chi * lq);
    };
    return q;
}

QuasiInverse quasi_inverse_check(double a, const ProductBasis& pb) {
    QuasiInverse q;
    q.inf = INFINITY;
    double mn = INFINITY;
    for (const auto& pr : pb.pairs) {
        double diff = std::abs(pr.l1 - a * pr.l2);
        double v = diff / (pr.l1 + pr.l2);
        if (v < q.inf) {
            q.inf = v;
            q.n1 = pr.n1;
            q.n2 = pr.n2;
            q.l1 = pr.l1;
            q.l2 = pr.l2;
        }
        mn = std::min(mn, diff);
    }
    q.op_norm = mn > 0 ? 1.0 / mn : INFINITY;
    return q;
}

}  // namespace fraclab
