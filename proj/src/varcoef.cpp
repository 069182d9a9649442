#include "fraclab/varcoef.hpp"

#include "fraclab/sobolev.hpp"

#include <cmath>
#include <regex>
#include <set>

namespace fraclab {

VarSymbol make_varsymbol(const std::string& name, double order_exponent, std::function<cplx(int, double)> f,
                         bool real) {
    VarSymbol p;
    p.name = name;
    p.order_exponent = order_exponent;
    p.real = real;
    p.eval = std::move(f);
    return p;
}

VarSymbol from_symbol(const Symbol& q) {
    VarSymbol p = make_varsymbol(q.name, q.order_exponent, [e = q.eval](int, double l) { return e(l); }, q.real);
    p.x_independent = true;
    return p;
}

Vec harmonic_function(const FractalGraph& g, int i) {
    if (g.boundary.empty()) config_error("harmonic functions need a graph with boundary");
    if (i < 0 || i >= int(g.boundary.size())) config_error("harmonic function index out of range");
    const int N = g.size();
    std::vector<int> inner;
    for (int v = 0; v < N; ++v)
        if (!g.is_boundary(v)) inner.push_back(v);
    Mat E = g.energy();
    const int n = int(inner.size());
    Mat A(n, n);
    Vec rhs(n);
    const int bv = g.boundary[std::size_t(i)];
    for (int a = 0; a < n; ++a) {
        for (int c = 0; c < n; ++c) A(a, c) = E(inner[std::size_t(a)], inner[std::size_t(c)]);
        rhs[a] = -E(inner[std::size_t(a)], bv);
    }
    Vec hi = A.ldlt().solve(rhs);
    Vec h = Vec::Zero(N);
    h[bv] = 1.0;
    for (int a = 0; a < n; ++a) h[inner[std::size_t(a)]] = hi[a];
    return h;
}

Vec x_feature(const EigenBasis& b, const std::string& name) {
    const FractalGraph& g = *b.graph;
    Vec full;
    static const std::regex phi("phi([0-9]+)"), harm("h([0-9])");
    std::smatch mt;
    if (std::regex_match(name, mt, phi)) {
        int n = std::stoi(mt[1]);
        if (n >= b.size()) config_error("x-feature " + name + ": basis has " + std::to_string(b.size()) + " functions");
        return b.vectors.col(n);
    }
    if (std::regex_match(name, mt, harm)) {
        full = harmonic_function(g, std::stoi(mt[1]));
    } else if (name == "x" || name == "y") {
        if (int(g.coords.size()) != g.size()) config_error("x-feature " + name + ": graph has no coordinates");
        full.resize(g.size());
        for (int v = 0; v < g.size(); ++v) full[v] = g.coords[std::size_t(v)][name == "x" ? 0 : 1];
    } else {
        config_error("unknown x-feature '" + name + "'");
    }
    return b.restrict(full);
}

VarSymbol parse_varsymbol(const std::string& text, const EigenBasis& b, double order_exponent) {
    static const std::set<std::string> lambda_names = {"l", "lambda", "lam", "λ"};
    static const std::set<std::string> reserved = {"exp", "log", "ln", "sin", "cos", "sqrt", "i", "pi"};
    static const std::regex ident("[A-Za-z_][A-Za-z_0-9]*");
    std::vector<std::string> feats;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), ident); it != std::sregex_iterator(); ++it) {
        std::string w = it->str();
        if (lambda_names.count(w) || reserved.count(w)) continue;
        if (std::find(feats.begin(), feats.end(), w) == feats.end()) feats.push_back(w);
    }
    std::vector<std::vector<std::string>> aliases = {{"l", "lambda", "lam", "λ"}};
    std::vector<Vec> fv;
    for (const auto& f : feats) {
        aliases.push_back({f});
        fv.push_back(x_feature(b, f));
    }
    auto expr = std::make_shared<Expr>(text, aliases);
    const int nf = int(feats.size());
    auto f = [expr, fv, nf](int row, double l) {
        std::vector<cplx> vars(static_cast<std::size_t>(nf + 1));
        vars[0] = l;
        for (int k = 0; k < nf; ++k) vars[std::size_t(k + 1)] = fv[std::size_t(k)][row];
        return expr->eval(vars);
    };
    VarSymbol p = make_varsymbol(text, order_exponent, f, expr->real());
    p.x_independent = nf == 0;
    return p;
}

VarSymbol harmonic_ratio_symbol(const EigenBasis& b) { return parse_varsymbol("(1+h0)*l/(1+l)", b, 0.0); }

CMat varsymbol_values(const VarSymbol& p, const EigenBasis& b) {
    CMat P(b.rows(), b.size());
    parallel_for(b.rows(), [&](int x) {
        for (int n = 0; n < b.size(); ++n) P(x, n) = p(x, b.eigenvalues[n]);
    });
    for (int x = 0; x < P.rows(); ++x)
        for (int n = 0; n < P.cols(); ++n)
            if (!std::isfinite(P(x, n).real()) || !std::isfinite(P(x, n).imag()))
                numeric_error("varcoef: p(x, lambda) not finite at row " + std::to_string(x) +
                              ", lambda = " + fmt(b.eigenvalues[n]));
    return P;
}

namespace {

// <f, phi_k>_mu for every column of F
CMat project(const EigenBasis& b, const CMat& F) {
    return b.vectors.transpose().cast<cplx>() * (b.mass.cast<cplx>().asDiagonal() * F);
}

}  // namespace

VarExpansion expand_symbol(const VarSymbol& p, const EigenBasis& b, double tol) {
    VarExpansion e;
    CMat P = varsymbol_values(p, b);
    e.m = project(b, P);
    CMat back = b.vectors.cast<cplx>() * e.m;
    double scale = std::max(1.0, P.cwiseAbs().maxCoeff());
    e.residual = (back - P).cwiseAbs().maxCoeff() / scale;
    if (e.residual > tol)
        numeric_error("expand_symbol: reconstruction residual " + fmt(e.residual) +
                      " (the basis does not span the vertex functions; keep the zero mode)");
    return e;
}

CVec apply_varcoef(const VarSymbol& p, const EigenBasis& b, const CVec& u) {
    CVec c = b.coefficients(u);
    CMat P = varsymbol_values(p, b);
    CVec out(b.rows());
    for (int x = 0; x < b.rows(); ++x) {
        cplx s = 0;
        for (int n = 0; n < b.size(); ++n) s += P(x, n) * b.vectors(x, n) * c[n];
        out[x] = s;
    }
    return out;
}

int expansion_index(double alpha) { return int(std::floor(alpha + 1.5)) + 1; }

ExpansionRoute apply_varcoef_expansion(const VarSymbol& p, const EigenBasis& b, const CVec& u, int n) {
    if (n < 0) config_error("expansion index must be >= 0");
    ExpansionRoute r;
    r.n = n;
    CMat P = varsymbol_values(p, b);
    CMat Pn = P;
    const CMat L = b.laplacian().cast<cplx>();
    for (int j = 0; j < n; ++j) Pn = L * Pn;
    CMat mt = project(b, Pn);  // lambda_k^n m_k(lambda)
    CMat m0 = project(b, P);
    const double tol = cluster_tolerance(b.eigenvalues);
    CVec c = b.coefficients(u);
    // Y(x, k) = (mt_k(-Delta) u)(x)
    CMat Y = b.vectors.cast<cplx>() * c.asDiagonal() * mt.transpose();
    CMat Y0 = b.vectors.cast<cplx>() * c.asDiagonal() * m0.transpose();
    r.value = CVec::Zero(b.rows());
    for (int k = 0; k < b.size(); ++k) {
        double lk = b.eigenvalues[k];
        if (std::abs(lk) <= tol)
            r.value += b.vectors.col(k).cast<cplx>().cwiseProduct(Y0.col(k));
        else
            r.value += b.vectors.col(k).cast<cplx>().cwiseProduct(Y.col(k)) / std::pow(lk, n);
    }
    return r;
}

KernelMatrix kernel_varcoef(const VarSymbol& p, const EigenBasis& b) {
    KernelMatrix K;
    K.symbol = p.name;
    K.basis_hash = b.hash();
    CMat PV = varsymbol_values(p, b).cwiseProduct(b.vectors.cast<cplx>());
    K.values.resize(b.rows(), b.rows());
    constexpr int block = 64;
    const int nb = (b.rows() + block - 1) / block;
    parallel_for(nb, [&](int k) {
        int lo = k * block, len = std::min(block, b.rows() - lo);
        const CMat blk = PV.middleRows(lo, len);
        Mat re = blk.real() * b.vectors.transpose();
        Mat im = blk.imag() * b.vectors.transpose();
        for (int i = 0; i < len; ++i)
            for (int j = 0; j < b.rows(); ++j) K.values(lo + i, j) = cplx(re(i, j), im(i, j));
    });
    return K;
}

SupnormFit supnorm_exponent_fit(const EigenBasis& b) {
    if (b.size() < 30) config_error("supnorm_exponent_fit needs at least 30 eigenfunctions");
    SupnormFit f;
    std::vector<double> xs, ys;
    const double tol = cluster_tolerance(b.eigenvalues);
    for (int k = 0; k < b.size(); ++k) {
        if (b.eigenvalues[k] <= tol) continue;
        xs.push_back(std::log(b.eigenvalues[k]));
        ys.push_back(std::log(b.vectors.col(k).cwiseAbs().maxCoeff()));
    }
    f.points = int(xs.size());
    LineFit lf = fit_line(xs, ys);
    f.slope = lf.slope;
    f.intercept = lf.intercept;
    f.alpha = lf.slope;
    double shift = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) shift = std::max(shift, ys[i] - (lf.intercept + lf.slope * xs[i]));
    f.c = std::exp(lf.intercept + shift);
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (ys[i] > std::log(f.c) + f.alpha * xs[i] + 1e-12) f.all_below = false;
    return f;
}

LqReport lq_bound_check(const VarSymbol& p, const EigenBasis& b, double q, int trials, std::uint64_t seed) {
    if (!(q > 1) || std::isinf(q)) config_error("lq_bound_check: need 1 < q < inf");
    LqReport r;
    r.q = q;
    r.trials = trials;
    const KernelMatrix K = kernel_varcoef(p, b);
    const CVec mu = b.mass.cast<cplx>();
    const CMat A = K.values * mu.asDiagonal();
    // adjoint in L2(mu)
    const CMat As = b.mass.cwiseInverse().cast<cplx>().asDiagonal() * A.adjoint() * mu.asDiagonal();
    const double qd = q / (q - 1.0);
    auto duality = [](const CVec& v, double s) {
        CVec w(v.size());
        for (int i = 0; i < v.size(); ++i) {
            double a = std::abs(v[i]);
            w[i] = a > 0 ? v[i] * std::pow(a, s - 2.0) : cplx(0);
        }
        return w;
    };
    auto ratio = [&](const CVec& u) { return lp_norm(b, A * u, q) / lp_norm(b, u, q); };
    Rng rng(seed);
    std::vector<std::pair<double, CVec>> starts;
    for (int t = 0; t < trials; ++t) {
        CVec u = rng.normal_vec(b.rows()).cast<cplx>();
        starts.push_back({ratio(u), u});
        r.max_ratio = std::max(r.max_ratio, starts.back().first);
    }
    std::stable_sort(starts.begin(), starts.end(), [](const auto& a, const auto& c) { return a.first > c.first; });
    // ascent restarts from the best draws: u <- J_q'(A* J_q(A u))
    const int restarts = std::min<int>(3, int(starts.size()));
    for (int s = 0; s < restarts; ++s) {
        CVec u = starts[std::size_t(s)].second;
        for (int it = 0; it < 40; ++it) {
            CVec z = As * duality(A * u, q);
            if (z.cwiseAbs().maxCoeff() == 0) break;
            u = duality(z, qd);
            u /= lp_norm(b, u, q);
            r.max_ratio = std::max(r.max_ratio, ratio(u));
        }
    }
    if (q == 2) {
        Vec sq = b.mass.cwiseSqrt();
        CMat S = sq.cast<cplx>().asDiagonal() * A * sq.cwiseInverse().cast<cplx>().asDiagonal();
        r.exact_l2 = Eigen::JacobiSVD<CMat>(S).singularValues()[0];
    }
    VarExpansion e = expand_symbol(p, b);
    for (int k = 0; k < b.size(); ++k)
        r.bound_proxy += b.vectors.col(k).cwiseAbs().maxCoeff() * e.m.row(k).cwiseAbs().maxCoeff();
    return r;
}

double commutator_norm(const VarSymbol& p, const Symbol& q, const EigenBasis& b, std::uint64_t seed) {
    Rng rng(seed);
    CVec u = rng.normal_vec(b.rows()).cast<cplx>();
    CVec a = apply_varcoef(p, b, apply(q, b, u));
    CVec c = apply(q, b, apply_varcoef(p, b, u));
    return lp_norm(b, a - c, 2) / lp_norm(b, u, 2);
}

ContinuityReport kernel_continuity(const KernelMatrix& K, const EigenBasis& b, const Mat& R, double d,
                                   double exclusion) {
    ContinuityReport r;
    r.exclusion = exclusion >= 0 ? exclusion : default_exclusion(b, R);
    const FractalGraph& g = *b.graph;
    std::vector<int> row(static_cast<std::size_t>(g.size()), -1);
    for (int i = 0; i < b.rows(); ++i) row[std::size_t(b.active[std::size_t(i)])] = i;
    for (const auto& e : g.edges) {
        int x = row[std::size_t(e.i)], xp = row[std::size_t(e.j)];
        if (x < 0 || xp < 0) continue;
        for (int y = 0; y < b.rows(); ++y) {
            int gy = b.active[std::size_t(y)];
            double rx = R(e.i, gy), rxp = R(e.j, gy);
            if (rx <= r.exclusion || rxp <= r.exclusion) continue;
            ++r.pairs;
            double v = std::abs(K.values(x, y) - K.values(xp, y)) * std::pow(std::min(rx, rxp), d);
            r.oscillation = std::max(r.oscillation, v);
        }
    }
    return r;
}

VarClassReport verify_varsymbol(const VarSymbol& p, const EigenBasis& b, int j_max, int k_max,
                                const std::vector<double>& grid) {
    if (k_max < 0 || k_max > 2) config_error("verify_varsymbol: k_max must be in 0..2");
    VarClassReport r;
    r.C.assign(std::size_t(j_max + 1), std::vector<double>(std::size_t(k_max + 1), 0.0));
    const Mat L = b.laplacian();
    for (double l : grid) {
        // D(x, k) = (lambda d/dlambda)^k p(x, lambda)
        CMat D(b.rows(), k_max + 1);
        parallel_for(b.rows(), [&](int x) {
            auto dv = richardson_derivatives([&](double t) { return p(x, t); }, l, k_max);
            D(x, 0) = dv[0];
            if (k_max >= 1) D(x, 1) = l * dv[1];
            if (k_max >= 2) D(x, 2) = l * dv[1] + l * l * dv[2];
        });
        const double w = std::pow(1.0 + l, -p.order_exponent);
        for (int j = 0; j <= j_max; ++j) {
            for (int k = 0; k <= k_max; ++k) {
                double v = D.col(k).cwiseAbs().maxCoeff() * w;
                if (!std::isfinite(v)) r.finite = false;
                r.C[std::size_t(j)][std::size_t(k)] = std::max(r.C[std::size_t(j)][std::size_t(k)], v);
            }
            D = L.cast<cplx>() * D;
        }
    }
    return r;
}

}  // namespace fraclab
