#include "fraclab/sobolev.hpp"

#include <cmath>

namespace fraclab {

double lp_norm(const EigenBasis& b, const CVec& u, double p) {
    if (std::isinf(p)) return u.cwiseAbs().maxCoeff();
    if (!(p >= 1)) config_error("lp_norm: p must be >= 1");
    double s = 0;
    for (int i = 0; i < u.size(); ++i) s += std::pow(std::abs(u[i]), p) * b.mass[i];
    return std::pow(s, 1.0 / p);
}

double hs_norm(const CVec& u, double s, const EigenBasis& b, double d) {
    CVec c = b.coefficients(u);
    double t = 0;
    for (int n = 0; n < b.size(); ++n) t += std::pow(1.0 + b.eigenvalues[n], 2.0 * s / (d + 1.0)) * std::norm(c[n]);
    return std::sqrt(t);
}

CVec bessel_power(const CVec& u, double s, const EigenBasis& b, double d) {
    CVec c = b.coefficients(u);
    for (int n = 0; n < b.size(); ++n) c[n] *= std::pow(1.0 + b.eigenvalues[n], s / (d + 1.0));
    return b.synthesize(c);
}

OpBound op_bound_hs(const Symbol& p, double m, double, const EigenBasis& b, double d) {
    OpBound r;
    CVec w = symbol_values(p, b);
    for (int n = 0; n < b.size(); ++n) {
        double v = std::abs(w[n]) * std::pow(1.0 + b.eigenvalues[n], -m / (d + 1.0));
        if (v > r.C) {
            r.C = v;
            r.argmax = n;
            r.argmax_lambda = b.eigenvalues[n];
        }
    }
    return r;
}

double lp_s_norm(const CVec& u, double s, double p, const EigenBasis& b, double d) {
    return lp_norm(b, bessel_power(u, s, b, d), p);
}

EmbeddingReport embedding_check(double s, double p, double q, const EigenBasis& b, double d, int trials,
                                std::uint64_t seed) {
    if (!(p >= 1)) config_error("embedding_check: p must be >= 1");
    if (!(s < d / p)) config_error("embedding_check: needs s < d/p (s=" + fmt(s) + ", d/p=" + fmt(d / p) + ")");
    double inv_q = 1.0 / p - s / d;
    if (std::isnan(q)) q = 1.0 / inv_q;
    if (std::abs(1.0 / q - inv_q) > 1e-9) config_error("embedding_check: exponents violate 1/q = 1/p - s/d");
    EmbeddingReport rep;
    rep.s = s;
    rep.p = p;
    rep.q = q;
    rep.d = d;
    Rng rng(seed);
    auto consider = [&](const CVec& u, const char* family) {
        double den = lp_s_norm(u, s, p, b, d);
        if (!(den > 0)) return;
        double r = lp_norm(b, u, q) / den;
        ++rep.trials;
        if (r > rep.max_ratio) {
            rep.max_ratio = r;
            rep.worst = family;
        }
    };
    for (int t = 0; t < trials; ++t) {
        // vertex noise, random signs on every mode, decaying smooth modes
        consider(rng.normal_vec(b.rows()).cast<cplx>(), "vertex-noise");
        CVec c(b.size());
        for (int n = 0; n < b.size(); ++n) c[n] = rng.uniform() < 0.5 ? -1.0 : 1.0;
        consider(b.synthesize(c), "random-signs");
        for (int n = 0; n < b.size(); ++n) c[n] = rng.normal() / (1.0 + b.eigenvalues[n]);
        consider(b.synthesize(c), "smooth");
    }
    for (int n = 0; n < b.size(); ++n) consider(b.vectors.col(n).cast<cplx>(), "eigenfunction");
    return rep;
}

}  // namespace fraclab
