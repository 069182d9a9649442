#include "fraclab/heat.hpp"

#include <algorithm>
#include <cmath>

namespace fraclab {

HeatKernelSlice heat_kernel(const EigenBasis& b, cplx z) {
    if (!(z.real() > 0)) config_error("heat_kernel: Re z must be positive");
    CVec w(b.size());
    for (int n = 0; n < b.size(); ++n) w[n] = std::exp(-b.eigenvalues[n] * z);
    CMat V = b.vectors.cast<cplx>();
    return {z, V * w.asDiagonal() * V.transpose()};
}

Mat heat_kernel_real(const EigenBasis& b, double t) {
    if (!(t > 0)) config_error("heat_kernel: t must be positive");
    Vec w = (-b.eigenvalues.array() * t).exp();
    return b.vectors * w.asDiagonal() * b.vectors.transpose();
}

Mat heat_diagonal(const EigenBasis& b, const std::vector<double>& ts, const std::vector<int>& rows) {
    Mat H(int(ts.size()), int(rows.size()));
    Mat sq(int(rows.size()), b.size());
    for (std::size_t r = 0; r < rows.size(); ++r) sq.row(int(r)) = b.vectors.row(rows[r]).array().square();
    for (std::size_t k = 0; k < ts.size(); ++k) {
        Vec w = (-b.eigenvalues.array() * ts[k]).exp();
        H.row(int(k)) = (sq * w).transpose();
    }
    return H;
}

std::vector<double> scaling_window(const EigenBasis& b, int points, double lo_factor, double hi_factor) {
    double lmin = b.eigenvalues[0], lmax = b.eigenvalues[b.size() - 1];
    if (!(lmin > 0)) config_error("scaling_window: spectrum must be positive");
    double t0 = lo_factor / lmax, t1 = hi_factor / lmin;
    // coarse levels: the window inverts, keep it ascending and let the fit flag it as narrow
    if (t0 > t1) std::swap(t0, t1);
    std::vector<double> ts;
    for (int k = 0; k < points; ++k) ts.push_back(t0 * std::pow(t1 / t0, double(k) / (points - 1)));
    return ts;
}

std::vector<int> bulk_rows(const EigenBasis& b, const Mat& R, double fraction) {
    const auto& g = *b.graph;
    std::vector<int> out;
    if (g.boundary.empty()) {
        for (int i = 0; i < b.rows(); ++i) out.push_back(i);
        return out;
    }
    std::vector<double> db(std::size_t(b.rows()));
    double mx = 0;
    for (int i = 0; i < b.rows(); ++i) {
        double m = INFINITY;
        for (int q : g.boundary) m = std::min(m, R(b.active[std::size_t(i)], q));
        db[std::size_t(i)] = m;
        mx = std::max(mx, m);
    }
    for (int i = 0; i < b.rows(); ++i)
        if (db[std::size_t(i)] >= fraction * mx) out.push_back(i);
    return out;
}

OnDiagonalFit fit_on_diagonal(const EigenBasis& b, const std::vector<double>& ts, const std::vector<int>& rows) {
    if (ts.size() < 2 || rows.empty()) config_error("fit_on_diagonal: need >= 2 times and >= 1 sample vertex");
    OnDiagonalFit f;
    f.t_lo = *std::min_element(ts.begin(), ts.end());
    f.t_hi = *std::max_element(ts.begin(), ts.end());
    f.samples = int(rows.size());
    f.narrow_window = ts.size() < 5 || f.t_hi / f.t_lo < 10.0;
    Mat H = heat_diagonal(b, ts, rows);
    std::vector<double> lt, lm;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        lt.push_back(std::log(ts[k]));
        lm.push_back(std::log(H.row(int(k)).mean()));
    }
    f.beta = -fit_line(lt, lm).slope;
    double s = 0, s2 = 0;
    for (int r = 0; r < H.cols(); ++r) {
        std::vector<double> y;
        for (int k = 0; k < H.rows(); ++k) y.push_back(std::log(H(k, r)));
        double bx = -fit_line(lt, y).slope;
        s += bx;
        s2 += bx * bx;
    }
    double n = double(H.cols());
    f.spread = std::sqrt(std::max(0.0, s2 / n - (s / n) * (s / n)));
    return f;
}

SubGaussianFit fit_subgaussian(const EigenBasis& b, const Mat& R, const std::vector<double>& ts,
                               const std::vector<std::pair<int, int>>& pairs, double d) {
    SubGaussianFit f;
    f.d = d;
    f.beta = d / (d + 1.0);
    struct Pt {
        double lt, s0, y;  // log t, R^{d+1}/t, log h + beta log t
    };
    std::vector<Pt> pts;
    for (double t : ts) {
        Vec w = (-b.eigenvalues.array() * t).exp();
        for (auto [x, y] : pairs) {
            double h = (b.vectors.row(x).array() * w.transpose().array() * b.vectors.row(y).array()).sum();
            if (!(h > 0)) {
                if (std::find(f.excluded.begin(), f.excluded.end(), std::make_pair(x, y)) == f.excluded.end())
                    f.excluded.emplace_back(x, y);
                continue;
            }
            double r = R(b.active[std::size_t(x)], b.active[std::size_t(y)]);
            pts.push_back({std::log(t), std::pow(r, d + 1.0) / t, std::log(h) + f.beta * std::log(t)});
        }
    }
    f.used = int(pts.size());
    if (pts.size() < 3) config_error("fit_subgaussian: fewer than 3 usable samples");
    // for fixed gamma the model y = a - c2 * s0^gamma is linear in (a, c2)
    auto solve = [&](double gamma, double& a, double& c2) {
        double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (const auto& p : pts) {
            double x = std::pow(p.s0, gamma);
            n += 1;
            sx += x;
            sy += p.y;
            sxx += x * x;
            sxy += x * p.y;
        }
        double det = n * sxx - sx * sx;
        if (std::abs(det) < 1e-300) {
            a = sy / n;
            c2 = 0;
        } else {
            double slope = (n * sxy - sx * sy) / det;
            a = (sy - slope * sx) / n;
            c2 = -slope;
        }
        double err = 0;
        for (const auto& p : pts) {
            double e = p.y - (a - c2 * std::pow(p.s0, gamma));
            err += e * e;
        }
        return c2 > 0 ? err : INFINITY;
    };
    double best = INFINITY, bg = 1.0;
    for (int k = 0; k <= 56; ++k) {
        double g = 0.2 + 0.05 * k;
        double a, c2;
        double e = solve(g, a, c2);
        if (e < best) {
            best = e;
            bg = g;
        }
    }
    double lo = std::max(0.05, bg - 0.05), hi = bg + 0.05;
    for (int it = 0; it < 60; ++it) {
        double m1 = lo + (hi - lo) * 0.381966, m2 = hi - (hi - lo) * 0.381966;
        double a, c2;
        if (solve(m1, a, c2) < solve(m2, a, c2))
            hi = m2;
        else
            lo = m1;
    }
    f.gamma = 0.5 * (lo + hi);
    double a, c2;
    solve(f.gamma, a, c2);
    f.c2 = c2;
    double rmax = -INFINITY;
    for (const auto& p : pts) rmax = std::max(rmax, p.y - (a - c2 * std::pow(p.s0, f.gamma)));
    f.residual_max = rmax;
    f.c1 = std::exp(a + std::max(0.0, rmax));
    double slack = INFINITY;
    for (const auto& p : pts) slack = std::min(slack, std::log(f.c1) - c2 * std::pow(p.s0, f.gamma) - p.y);
    f.bound_slack = slack;
    return f;
}

ComplexBoundReport complex_bound_check(const EigenBasis& b, const std::vector<cplx>& zs,
                                       const std::vector<int>& rows, double d) {
    ComplexBoundReport rep;
    rep.beta = d / (d + 1.0);
    CMat Vs(int(rows.size()), b.size());
    for (std::size_t r = 0; r < rows.size(); ++r) Vs.row(int(r)) = b.vectors.row(rows[r]).cast<cplx>();
    for (cplx z : zs) {
        if (!(z.real() > 0)) config_error("complex_bound_check: samples need Re z > 0");
        CVec w(b.size());
        for (int n = 0; n < b.size(); ++n) w[n] = std::exp(-b.eigenvalues[n] * z);
        CMat H = Vs * w.asDiagonal() * Vs.transpose();
        double sup = H.cwiseAbs().maxCoeff();
        double th = std::arg(z);
        ComplexBoundSample s{z, th, sup, sup * std::pow(z.real(), rep.beta),
                             sup * std::pow(std::abs(z) * std::cos(th), rep.beta) / std::pow(2.0, rep.beta)};
        rep.c_re = std::max(rep.c_re, s.c_re);
        rep.c_polar = std::max(rep.c_polar, s.c_polar);
        rep.samples.push_back(s);
    }
    return rep;
}

}  // namespace fraclab
