#include "fraclab/psido.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace fraclab {

std::vector<double> dyadic_grid(double lo, double hi, int per_octave) {
    if (!(lo > 0) || !(hi > lo) || per_octave < 1) config_error("dyadic_grid: need 0 < lo < hi");
    std::vector<double> g;
    int n = int(std::ceil(std::log2(hi / lo) * per_octave));
    for (int k = 0; k <= n; ++k) g.push_back(lo * std::exp2(double(k) / per_octave));
    return g;
}

std::vector<double> spectrum_grid(const EigenBasis& b, int per_octave) {
    double lo = INFINITY, hi = 0;
    for (int n = 0; n < b.size(); ++n)
        if (b.eigenvalues[n] > 0) {
            lo = std::min(lo, b.eigenvalues[n]);
            hi = std::max(hi, b.eigenvalues[n]);
        }
    if (!(hi > 0)) config_error("spectrum_grid: basis has no positive eigenvalue");
    return dyadic_grid(lo / 2, std::max(hi * 2, lo), per_octave);
}

bool tail_stable(const std::vector<double>& v) {
    if (v.size() < 4) return true;
    std::size_t cut = v.size() - (v.size() + 3) / 4;
    double head = 0, tail = 0;
    for (std::size_t i = 0; i < v.size(); ++i) (i < cut ? head : tail) = std::max(i < cut ? head : tail, v[i]);
    if (tail <= 1e-13 * std::max(1.0, head)) return true;
    return tail <= 2.0 * head;
}

namespace {

// (lambda^rho d/dlambda)^k p at lambda, from p^(j)(lambda), j <= k.
// Terms are tracked as (exponent of lambda, derivative order) -> coefficient.
std::vector<cplx> scaled_derivatives(const std::vector<cplx>& d, double lambda, double rho, int k_max) {
    std::vector<cplx> out;
    std::map<std::pair<double, int>, double> cur{{{0.0, 0}, 1.0}};
    for (int k = 0; k <= k_max; ++k) {
        cplx s = 0;
        for (const auto& [key, c] : cur) s += c * std::pow(lambda, key.first) * d[std::size_t(key.second)];
        out.push_back(s);
        std::map<std::pair<double, int>, double> nxt;
        for (const auto& [key, c] : cur) {
            auto [e, j] = key;
            if (e != 0) nxt[{e - 1 + rho, j}] += c * e;
            nxt[{e + rho, j + 1}] += c;
        }
        cur = std::move(nxt);
    }
    return out;
}

}  // namespace

SymbolClassReport verify_symbol_class(const Symbol& p, double m, double rho, int k_max,
                                      const std::vector<double>& grid, double d) {
    if (k_max < 0 || k_max > 6) config_error("verify_symbol_class: k_max must be in [0, 6]");
    if (rho < 0 || rho > 1) config_error("verify_symbol_class: rho must be in [0, 1]");
    SymbolClassReport r;
    r.m = m;
    r.rho = rho;
    r.d = d;
    r.k_max = k_max;
    r.closed_form = bool(p.jet);
    r.C.assign(std::size_t(k_max + 1), 0.0);
    r.argmax.assign(std::size_t(k_max + 1), 0.0);
    std::vector<std::vector<double>> per(std::size_t(k_max + 1));
    for (double l : grid) {
        auto der = p.derivatives(l, k_max);
        auto sd = scaled_derivatives(der, l, rho, k_max);
        double w = std::pow(1.0 + l, -m / (d + 1.0));
        for (int k = 0; k <= k_max; ++k) {
            double v = std::abs(sd[std::size_t(k)]) * w;
            if (!std::isfinite(v)) {
                r.finite = false;
                r.failures.push_back("k=" + std::to_string(k) + " lambda=" + fmt(l));
                continue;
            }
            per[std::size_t(k)].push_back(v);
            if (v > r.C[std::size_t(k)]) {
                r.C[std::size_t(k)] = v;
                r.argmax[std::size_t(k)] = l;
            }
        }
    }
    for (const auto& v : per) r.stable = r.stable && tail_stable(v);
    r.passes = r.finite && r.stable;
    return r;
}

double lp_eta(double lambda) {
    double a = std::abs(lambda);
    if (a <= 1) return 1;
    if (a >= 2) return 0;
    auto g = [](double t) { return t > 0 ? std::exp(-1.0 / t) : 0.0; };
    double u = g(2 - a), v = g(a - 1);
    return u / (u + v);
}

double lp_delta(double lambda) { return lp_eta(lambda) - lp_eta(2 * lambda); }

LPDecomposition lp_decompose(const Symbol& p, int n_lo, int n_hi, const std::vector<double>& grid) {
    if (n_hi < n_lo) config_error("lp_decompose: empty range");
    LPDecomposition dec;
    dec.n_lo = n_lo;
    dec.n_hi = n_hi;
    for (int n = n_lo; n <= n_hi; ++n) {
        Symbol q;
        q.name = p.name + "#lp" + std::to_string(n);
        q.order_exponent = p.order_exponent;
        q.rho = p.rho;
        q.real = p.real;
        q.needs_nonzero = p.needs_nonzero;
        auto f = p.eval;
        double s = std::exp2(-n);
        q.eval = [f, s](double l) { return f(l) * lp_delta(s * l); };
        dec.pieces.push_back({n, q});
    }
    double lo = std::exp2(n_lo), hi = std::exp2(n_hi);
    for (double l : grid) {
        if (l < lo || l > hi) continue;
        cplx s = 0;
        for (const auto& pc : dec.pieces) s += pc.piece(l);
        cplx ref = p(l);
        dec.reconstruction_error = std::max(dec.reconstruction_error, std::abs(s - ref) / std::max(1.0, std::abs(ref)));
    }
    if (dec.reconstruction_error > 1e-10)
        numeric_error("lp_decompose: reconstruction error " + fmt(dec.reconstruction_error));
    return dec;
}

CVec symbol_values(const Symbol& p, const EigenBasis& b) {
    CVec w(b.size());
    std::vector<double> bad;
    double scale = b.size() ? std::abs(b.eigenvalues[b.size() - 1]) : 0.0;
    for (int n = 0; n < b.size(); ++n) {
        double l = b.eigenvalues[n];
        if (p.needs_nonzero && std::abs(l) <= 1e-12 * std::max(1.0, scale)) {
            config_error("symbol " + p.name + " is undefined at the zero eigenvalue; exclude the zero mode");
        }
        w[n] = p(l);
        if (!std::isfinite(w[n].real()) || !std::isfinite(w[n].imag())) bad.push_back(l);
    }
    if (!bad.empty()) {
        std::ostringstream os;
        os << "symbol " << p.name << " is undefined at eigenvalues";
        for (std::size_t i = 0; i < bad.size() && i < 10; ++i) os << " " << fmt(bad[i]);
        if (bad.size() > 10) os << " ... (" << bad.size() << " total)";
        numeric_error(os.str());
    }
    return w;
}

CVec apply(const Symbol& p, const EigenBasis& b, const CVec& u) {
    CVec w = symbol_values(p, b);
    CVec c = b.coefficients(u);
    return b.synthesize(CVec(w.cwiseProduct(c)));
}

CVec apply(const Symbol& p, const EigenBasis& b, const Vec& u) { return apply(p, b, CVec(u.cast<cplx>())); }

ComposeReport compose_check(const Symbol& p1, const Symbol& p2, const EigenBasis& b, int trials, std::uint64_t seed) {
    ComposeReport rep;
    rep.trials = trials;
    Rng rng(seed);
    Symbol prod = p1 * p2;
    auto norm = [&](const CVec& v) {
        double s = 0;
        for (int i = 0; i < v.size(); ++i) s += std::norm(v[i]) * b.mass[i];
        return std::sqrt(s);
    };
    for (int t = 0; t < trials; ++t) {
        CVec u(b.rows());
        for (int i = 0; i < b.rows(); ++i) u[i] = cplx(rng.normal(), rng.normal());
        CVec a = apply(p1, b, apply(p2, b, u));
        CVec c = apply(prod, b, u);
        double den = std::max(norm(c), 1e-300);
        rep.max_deviation = std::max(rep.max_deviation, norm(a - c) / den);
    }
    return rep;
}

bool KernelMatrix::is_real(double tol) const {
    return values.imag().cwiseAbs().maxCoeff() <= tol * std::max(1.0, values.real().cwiseAbs().maxCoeff());
}

CVec KernelMatrix::integrate(const EigenBasis& b, const CVec& u) const {
    return values * CVec(u.cwiseProduct(b.mass.cast<cplx>()));
}

CMat spectral_sum(const Mat& V, const CVec& weights, const Mat& W) {
    constexpr int block = 128;
    const int n = int(weights.size());
    const int nb = std::max(1, (n + block - 1) / block);
    bool complex = false;
    for (int i = 0; i < n; ++i)
        if (weights[i].imag() != 0) complex = true;
    std::vector<CMat> parts(static_cast<std::size_t>(nb));
    parallel_for(nb, [&](int k) {
        int lo = k * block, len = std::min(block, n - lo);
        Mat Vb = V.middleCols(lo, len);
        Mat Wb = W.middleCols(lo, len);
        Vec wr = weights.segment(lo, len).real();
        Mat re = (Vb * wr.asDiagonal()) * Wb.transpose();
        if (complex) {
            Vec wi = weights.segment(lo, len).imag();
            Mat im = (Vb * wi.asDiagonal()) * Wb.transpose();
            parts[std::size_t(k)] = CMat(re.rows(), re.cols());
            parts[std::size_t(k)].real() = re;
            parts[std::size_t(k)].imag() = im;
        } else {
            parts[std::size_t(k)] = re.cast<cplx>();
        }
    });
    // fixed pairwise tree
    for (int stride = 1; stride < nb; stride *= 2)
        for (int k = 0; k + stride < nb; k += 2 * stride) parts[std::size_t(k)] += parts[std::size_t(k + stride)];
    if (n == 0) return CMat::Zero(V.rows(), W.rows());
    return parts[0];
}

KernelMatrix kernel(const Symbol& p, const EigenBasis& b) {
    KernelMatrix K;
    K.symbol = p.name;
    K.basis_hash = b.hash();
    K.values = spectral_sum(b.vectors, symbol_values(p, b), b.vectors);
    return K;
}

double default_exclusion(const EigenBasis& b, const Mat& R) { return 2.0 * cell_diameter(*b.graph, R); }

DecayReport decay_report(const KernelMatrix& K, const EigenBasis& b, const Mat& R, double alpha, int l, int k,
                         double exclusion) {
    DecayReport rep;
    rep.alpha = alpha;
    rep.l = l;
    rep.k = k;
    rep.exclusion = exclusion >= 0 ? exclusion : default_exclusion(b, R);
    CMat A = K.values;
    if (l > 0 || k > 0) {
        Mat L = b.laplacian();
        for (int i = 0; i < l; ++i) A = L.cast<cplx>() * A;
        for (int i = 0; i < k; ++i) A = A * L.transpose().cast<cplx>();
    }
    for (int x = 0; x < b.rows(); ++x)
        for (int y = 0; y < b.rows(); ++y) {
            int gx = b.active[std::size_t(x)], gy = b.active[std::size_t(y)];
            double r = R(gx, gy);
            if (x == y || r < rep.exclusion) continue;
            ++rep.admissible;
            double v = std::abs(A(x, y)) * std::pow(r, alpha);
            if (v > rep.sup) {
                rep.sup = v;
                rep.argmax_x = gx;
                rep.argmax_y = gy;
                rep.argmax_r = r;
            }
        }
    if (rep.admissible == 0)
        config_error("decay_report: no vertex pair has resistance >= " + fmt(rep.exclusion) + " at this level");
    return rep;
}

namespace {

void check_nonvanishing(const std::vector<std::pair<double, double>>& pts, const std::vector<cplx>& vals) {
    double mx = 0;
    for (auto v : vals) mx = std::max(mx, std::abs(v));
    for (std::size_t i = 0; i < vals.size(); ++i) {
        bool zero = std::abs(vals[i]) <= 1e-14 * mx;
        bool flip = i > 0 && vals[i].imag() == 0 && vals[i - 1].imag() == 0 &&
                    vals[i].real() * vals[i - 1].real() < 0 && pts[i].second == pts[i - 1].second;
        if (zero || flip) {
            std::ostringstream os;
            os << "hormander_check: symbol vanishes near (" << fmt(pts[i].first) << ", " << fmt(pts[i].second) << ")";
            numeric_error(os.str());
        }
    }
}

void finish(HormanderReport& r) {
    r.passes = r.finite && r.stable;
    if (std::isfinite(r.gamma)) r.hypothesis_ok = r.eps > 1.0 / (r.gamma + 1.0);
}

}  // namespace

HormanderReport hormander_check(const Symbol& p, double eps, double A, int alpha_max, const std::vector<double>& grid,
                                double gamma) {
    HormanderReport r;
    r.eps = eps;
    r.A = A;
    r.alpha_max = alpha_max;
    r.gamma = gamma;
    std::vector<std::pair<double, double>> pts;
    std::vector<cplx> vals;
    std::vector<std::vector<cplx>> ders;
    for (double l : grid) {
        if (l < A) continue;
        pts.push_back({l, 0.0});
        ders.push_back(p.derivatives(l, alpha_max));
        vals.push_back(ders.back()[0]);
    }
    if (pts.empty()) config_error("hormander_check: no grid point with |lambda| >= A");
    check_nonvanishing(pts, vals);
    for (int a = 1; a <= alpha_max; ++a) {
        HormanderTerm t;
        t.a1 = a;
        std::vector<double> per;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            double v = std::abs(ders[i][std::size_t(a)] / vals[i]) * std::pow(pts[i].first, eps * a);
            if (!std::isfinite(v)) {
                r.finite = false;
                continue;
            }
            per.push_back(v);
            if (v > t.c) {
                t.c = v;
                t.at1 = pts[i].first;
            }
        }
        t.stable = tail_stable(per);
        r.stable = r.stable && t.stable;
        r.terms.push_back(t);
    }
    finish(r);
    return r;
}

std::vector<std::pair<double, double>> quadrant_grid(const std::vector<double>& radii, int rays) {
    std::vector<std::pair<double, double>> pts;
    for (int j = -1; j <= rays; ++j) {
        for (double r : radii) {
            if (j == -1)
                pts.push_back({0.0, r});
            else if (j == rays)
                pts.push_back({r, 0.0});
            else {
                double t = std::pow(10.0, -4.0 + 8.0 * j / std::max(1, rays - 1));
                pts.push_back({r * t / (1 + t), r / (1 + t)});
            }
        }
    }
    return pts;
}

HormanderReport hormander_check(const Symbol2& p, double eps, double A, int alpha_max,
                                const std::vector<std::pair<double, double>>& grid, double gamma) {
    HormanderReport r;
    r.eps = eps;
    r.A = A;
    r.alpha_max = alpha_max;
    r.gamma = gamma;
    std::vector<std::pair<double, double>> pts;
    std::vector<Taylor> jets;
    std::vector<cplx> vals;
    for (auto [a, b] : grid) {
        if (a + b < A) continue;
        pts.push_back({a, b});
        jets.push_back(p.expand(a, b, alpha_max));
        vals.push_back(jets.back().value());
    }
    if (pts.empty()) config_error("hormander_check: no grid point with |lambda| >= A");
    check_nonvanishing(pts, vals);
    for (int a1 = 0; a1 <= alpha_max; ++a1)
        for (int a2 = 0; a1 + a2 <= alpha_max; ++a2) {
            if (a1 + a2 == 0) continue;
            HormanderTerm t;
            t.a1 = a1;
            t.a2 = a2;
            // group by ray so the tail test follows growing |lambda|
            std::map<std::size_t, std::vector<double>> rays;
            std::size_t ray = 0;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                if (i > 0 && pts[i].first + pts[i].second < pts[i - 1].first + pts[i - 1].second) ++ray;
                double v = std::abs(jets[i].derivative(a1, a2) / vals[i]) *
                           std::pow(pts[i].first + pts[i].second, eps * (a1 + a2));
                if (!std::isfinite(v)) {
                    r.finite = false;
                    continue;
                }
                rays[ray].push_back(v);
                if (v > t.c) {
                    t.c = v;
                    t.at1 = pts[i].first;
                    t.at2 = pts[i].second;
                }
            }
            for (const auto& [k, v] : rays) t.stable = t.stable && tail_stable(v);
            r.stable = r.stable && t.stable;
            r.terms.push_back(t);
        }
    finish(r);
    return r;
}

double rho_kernel_exponent(double d, double gamma, double rho) {
    double den = rho * (gamma + 1.0) - 1.0;
    if (!(den > 0)) config_error("rho_kernel_exponent: needs rho (gamma+1) > 1");
    return d * gamma / den;
}

}  // namespace fraclab
