#include "fraclab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fraclab {

BC parse_bc(const std::string& s) {
    if (s == "dirichlet") return BC::Dirichlet;
    if (s == "neumann") return BC::Neumann;
    if (s == "none") return BC::None;
    config_error("unknown boundary condition '" + s + "'");
}

std::string to_string(BC bc) {
    switch (bc) {
        case BC::Dirichlet: return "dirichlet";
        case BC::Neumann: return "neumann";
        case BC::None: return "none";
    }
    return "?";
}

std::uint64_t EigenBasis::hash() const {
    std::ostringstream s;
    s << hex64(graph->hash()) << '/' << to_string(bc) << '/' << plain << '/' << zero_mode_excluded;
    return fnv1a(s.str());
}

Vec EigenBasis::coefficients(const Vec& u) const { return vectors.transpose() * mass.cwiseProduct(u); }

CVec EigenBasis::coefficients(const CVec& u) const {
    CVec w = mass.cast<cplx>().cwiseProduct(u);
    return vectors.transpose().cast<cplx>() * w;
}

Vec EigenBasis::synthesize(const Vec& c) const { return vectors * c; }
CVec EigenBasis::synthesize(const CVec& c) const { return vectors.cast<cplx>() * c; }

double EigenBasis::inner(const Vec& u, const Vec& v) const { return u.dot(mass.cwiseProduct(v)); }

Vec EigenBasis::restrict(const Vec& full) const {
    Vec r(rows());
    for (int i = 0; i < rows(); ++i) r[i] = full[active[std::size_t(i)]];
    return r;
}

Mat EigenBasis::energy() const {
    Mat E = graph->energy(plain);
    Mat A(rows(), rows());
    for (int i = 0; i < rows(); ++i)
        for (int j = 0; j < rows(); ++j) A(i, j) = E(active[std::size_t(i)], active[std::size_t(j)]);
    return A;
}

Mat EigenBasis::laplacian() const {
    Mat A = energy();
    for (int i = 0; i < rows(); ++i) A.row(i) /= mass[i];
    return A;
}

double cluster_tolerance(const Vec& ev) {
    double mx = ev.size() ? ev.cwiseAbs().maxCoeff() : 1.0;
    return 1e-9 * std::max(1.0, mx);
}

namespace {

// Replace each degenerate block by Gram-Schmidt of the projected unit vectors e_0, e_1, ...
void canonicalize(Mat& V, const Vec& mass, const Vec& ev) {
    const int n = int(V.rows());
    for (auto [b, e] : clusters(ev, cluster_tolerance(ev))) {
        const int k = e - b;
        Mat W = V.middleCols(b, k);
        Mat Q(n, k);
        int got = 0;
        for (int i = 0; i < n && got < k; ++i) {
            Vec v = W * (mass[i] * W.row(i).transpose());
            for (int pass = 0; pass < 2; ++pass)
                for (int q = 0; q < got; ++q) v -= Q.col(q) * Q.col(q).dot(mass.cwiseProduct(v));
            double nv = std::sqrt(v.dot(mass.cwiseProduct(v)));
            if (nv > 1e-6 * std::sqrt(mass[i])) Q.col(got++) = v / nv;
        }
        if (got != k) continue;
        // re-express in the solver's orthonormal block and orthonormalize there, small pivots lose accuracy
        Mat C = W.transpose() * mass.asDiagonal() * Q;
        Eigen::HouseholderQR<Mat> qr(C);
        Mat Qf = qr.householderQ() * Mat::Identity(k, k);
        Mat R = qr.matrixQR().triangularView<Eigen::Upper>();
        for (int j = 0; j < k; ++j)
            if (R(j, j) < 0) Qf.col(j) = -Qf.col(j);
        V.middleCols(b, k) = W * Qf;
    }
}

std::string cache_path(const std::string& dir, std::uint64_t key) {
    return (std::filesystem::path(dir) / ("basis-" + hex64(key) + ".bin")).string();
}

std::uint64_t cache_key(const FractalGraph& g, BC bc, const EigenOptions& opt) {
    std::ostringstream s;
    s << hex64(g.hash()) << '/' << to_string(bc) << '/' << opt.plain << '/' << opt.keep_zero_mode;
    return fnv1a(s.str());
}

template <class T>
void put(std::ofstream& f, const T* p, std::size_t n) {
    f.write(reinterpret_cast<const char*>(p), std::streamsize(n * sizeof(T)));
}
template <class T>
bool get(std::ifstream& f, T* p, std::size_t n) {
    f.read(reinterpret_cast<char*>(p), std::streamsize(n * sizeof(T)));
    return bool(f);
}

bool load_cache(const std::string& path, EigenBasis& b) {
    std::ifstream f(path, std::ios::binary);
    if (!f) return false;
    char magic[4];
    std::int64_t r = 0, k = 0;
    if (!get(f, magic, 4) || std::memcmp(magic, "FLB1", 4) != 0) return false;
    if (!get(f, &r, 1) || !get(f, &k, 1)) return false;
    if (r <= 0 || r > b.graph->size() || k < 0 || k > r) return false;
    std::uint8_t z = 0;
    if (!get(f, &z, 1)) return false;
    b.active.resize(std::size_t(r));
    std::vector<std::int32_t> act(static_cast<std::size_t>(r));
    if (!get(f, act.data(), act.size())) return false;
    for (std::size_t i = 0; i < act.size(); ++i) b.active[i] = act[i];
    b.mass.resize(r);
    b.eigenvalues.resize(k);
    b.vectors.resize(r, k);
    if (!get(f, b.mass.data(), std::size_t(r))) return false;
    if (!get(f, b.eigenvalues.data(), std::size_t(k))) return false;
    if (!get(f, b.vectors.data(), std::size_t(r * k))) return false;
    b.zero_mode_excluded = z != 0;
    return true;
}

void save_cache(const std::string& path, const EigenBasis& b) {
    std::filesystem::create_directories(std::filesystem::path(path).parent_path());
    std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) return;
        std::int64_t r = b.rows(), k = b.size();
        std::uint8_t z = b.zero_mode_excluded;
        put(f, "FLB1", 4);
        put(f, &r, 1);
        put(f, &k, 1);
        put(f, &z, 1);
        std::vector<std::int32_t> act(b.active.begin(), b.active.end());
        put(f, act.data(), act.size());
        put(f, b.mass.data(), std::size_t(r));
        put(f, b.eigenvalues.data(), std::size_t(k));
        put(f, b.vectors.data(), std::size_t(r * k));
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace

EigenBasis eigensolve(const FractalGraph& g, BC bc, const EigenOptions& opt) {
    return eigensolve(std::make_shared<const FractalGraph>(g), bc, opt);
}

EigenBasis eigensolve(std::shared_ptr<const FractalGraph> gp, BC bc, const EigenOptions& opt) {
    const FractalGraph& g = *gp;
    if (bc == BC::None && !g.boundary.empty())
        config_error("bc 'none' is for closed fractafolds; this graph has a boundary");
    if (bc != BC::None && g.boundary.empty())
        config_error("dirichlet/neumann need a nonempty boundary; use bc 'none'");

    EigenBasis b;
    b.graph = gp;
    b.bc = bc;
    b.plain = opt.plain;

    std::string path;
    if (!opt.cache_dir.empty()) {
        path = cache_path(opt.cache_dir, cache_key(g, bc, opt));
        if (load_cache(path, b)) return b;
        b = EigenBasis{};
        b.graph = gp;
        b.bc = bc;
        b.plain = opt.plain;
    }

    for (int v = 0; v < g.size(); ++v)
        if (!(bc == BC::Dirichlet && g.is_boundary(v))) b.active.push_back(v);
    const int n = int(b.active.size());
    if (n == 0) config_error("no active vertices for this boundary condition");
    b.mass.resize(n);
    for (int i = 0; i < n; ++i) b.mass[i] = opt.plain ? 1.0 : g.mass[std::size_t(b.active[std::size_t(i)])];

    Mat A = b.energy();
    Vec s = b.mass.cwiseSqrt().cwiseInverse();
    A = s.asDiagonal() * A * s.asDiagonal();
    A = 0.5 * (A + A.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(A);
    if (es.info() != Eigen::Success) {
        Eigen::JacobiSVD<Mat> svd(A);
        const Vec& sv = svd.singularValues();
        numeric_error("eigensolver did not converge; condition number " +
                      fmt(sv[0] / std::max(sv[sv.size() - 1], 1e-300)));
    }
    Vec ev = es.eigenvalues();
    Mat V = s.asDiagonal() * es.eigenvectors();
    const double tol = cluster_tolerance(ev);
    for (int i = 0; i < ev.size(); ++i)
        if (std::abs(ev[i]) <= 1e-12 * std::max(1.0, ev.cwiseAbs().maxCoeff())) ev[i] = 0.0;
    canonicalize(V, b.mass, ev);

    int skip = 0;
    if (bc != BC::Dirichlet && !opt.keep_zero_mode && std::abs(ev[0]) <= tol) {
        skip = 1;
        b.zero_mode_excluded = true;
    }
    b.eigenvalues = ev.tail(n - skip);
    b.vectors = V.rightCols(n - skip);
    if (!path.empty()) save_cache(path, b);
    return b;
}

DecimationResult decimation_spectrum(int level) {
    if (level < 1) config_error("decimation_spectrum: level must be >= 1");
    std::vector<double> cur = {2.0, 5.0, 5.0};
    long long p3 = 3;  // 3^m
    for (int m = 2; m <= level; ++m) {
        long long prev = p3;
        p3 *= 3;
        std::vector<double> next;
        for (double lam : cur) {
            double disc = std::sqrt(std::max(0.0, 25.0 - 4.0 * lam));
            double lo = (5.0 - disc) / 2.0, hi = (5.0 + disc) / 2.0;
            // 6 has the forbidden child 2; only the 3-branch continues
            if (std::abs(lam - 6.0) < 1e-9) {
                next.push_back(hi);
            } else {
                next.push_back(lo);
                next.push_back(hi);
            }
        }
        for (long long k = 0; k < (prev + 3) / 2; ++k) next.push_back(5.0);
        for (long long k = 0; k < (p3 - 3) / 2; ++k) next.push_back(6.0);
        cur = std::move(next);
    }
    std::sort(cur.begin(), cur.end());
    DecimationResult r;
    r.values = cur;
    if (level <= 4) {
        FractalGraph g = build(Kind::Gasket, level);
        EigenBasis b = eigensolve(g, BC::Dirichlet, EigenOptions{.plain = true, .keep_zero_mode = false, .cache_dir = {}});
        if (b.size() != int(cur.size()))
            check_error("decimation bookkeeping: " + std::to_string(cur.size()) + " values vs " +
                        std::to_string(b.size()) + " from the dense solver");
        std::ostringstream diff;
        double worst = 0;
        for (int i = 0; i < b.size(); ++i) {
            double d = std::abs(b.eigenvalues[i] - cur[std::size_t(i)]);
            worst = std::max(worst, d);
            if (d > 1e-10) diff << "  index " << i << ": decimation " << fmt(cur[std::size_t(i)]) << " dense " << fmt(b.eigenvalues[i]) << "\n";
        }
        r.oracle_checked = true;
        r.max_oracle_diff = worst;
        if (worst > 1e-10) check_error("decimation spectrum disagrees with dense eigensolve:\n" + diff.str());
    }
    return r;
}

RenormReport renormalized_limits(const std::vector<int>& levels, BC bc, int n_branches) {
    if (levels.size() < 3) config_error("renormalized_limits needs at least 3 levels");
    for (std::size_t i = 1; i < levels.size(); ++i)
        if (levels[i] != levels[i - 1] + 1) config_error("renormalized_limits needs consecutive levels");
    RenormReport rep;
    rep.levels = levels;
    std::vector<std::vector<double>> plain, gen;
    EigenOptions po{.plain = true, .keep_zero_mode = true, .cache_dir = {}}, go{.plain = false, .keep_zero_mode = true, .cache_dir = {}};
    for (int m : levels) {
        FractalGraph g = build(Kind::Gasket, m);
        EigenBasis bp = eigensolve(g, bc, po), bg = eigensolve(g, bc, go);
        if (bp.size() < n_branches) config_error("renormalized_limits: level too small for the branch count");
        std::vector<double> p, q;
        for (int i = 0; i < n_branches; ++i) {
            p.push_back(std::pow(5.0, m) * bp.eigenvalues[i]);
            q.push_back(bg.eigenvalues[i]);
        }
        plain.push_back(p);
        gen.push_back(q);
    }
    double num = 0, den = 0;
    for (std::size_t l = 0; l < levels.size(); ++l)
        for (int i = 0; i < n_branches; ++i) {
            num += gen[l][std::size_t(i)] * plain[l][std::size_t(i)];
            den += plain[l][std::size_t(i)] * plain[l][std::size_t(i)];
        }
    rep.c = den > 0 ? num / den : 0.0;
    const auto& lastp = plain.back();
    const auto& lastg = gen.back();
    for (int i = 0; i < n_branches; ++i) {
        double s = lastp[std::size_t(i)];
        rep.per_branch_c.push_back(s > 0 ? lastg[std::size_t(i)] / s : 0.0);
        BranchReport br;
        br.branch = i;
        for (std::size_t l = 0; l < levels.size(); ++l) br.scaled.push_back(rep.c * plain[l][std::size_t(i)]);
        for (std::size_t l = 1; l < br.scaled.size(); ++l) br.increments.push_back(br.scaled[l] - br.scaled[l - 1]);
        double scale = std::max(1.0, std::abs(br.scaled.back()));
        for (std::size_t l = 1; l < br.increments.size(); ++l)
            if (std::abs(br.increments[l]) > std::abs(br.increments[l - 1]) + 1e-12 * scale) br.cauchy = false;
        rep.branches.push_back(br);
    }
    return rep;
}

std::vector<Gap> spectral_gaps(const std::vector<double>& eigenvalues, double min_relative_width) {
    std::vector<double> v;
    for (double x : eigenvalues)
        if (x > 0) v.push_back(x);
    std::sort(v.begin(), v.end());
    std::vector<double> d;
    for (double x : v)
        if (d.empty() || x - d.back() > 1e-9 * std::max(1.0, x)) d.push_back(x);
    struct R {
        double r, a, b;
    };
    std::vector<R> ratios;
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = 0; j < i; ++j) ratios.push_back({d[i] / d[j], d[i], d[j]});
    std::sort(ratios.begin(), ratios.end(), [](const R& x, const R& y) { return x.r < y.r; });
    std::vector<Gap> out;
    R prev{1.0, 0.0, 0.0};
    if (!d.empty()) prev = {1.0, d[0], d[0]};
    for (const auto& r : ratios) {
        double rel = (r.r - prev.r) / prev.r;
        if (rel >= min_relative_width && r.r > prev.r)
            out.push_back({prev.r, r.r, rel, {prev.a, prev.b}, {r.a, r.b}});
        prev = r;
    }
    return out;
}

WeylFit weyl_fit(const Vec& ev, double lo, double hi, int points) {
    WeylFit w;
    w.lambda_lo = lo;
    w.lambda_hi = hi;
    std::vector<double> s(ev.data(), ev.data() + ev.size());
    std::sort(s.begin(), s.end());
    std::vector<double> xs, ys;
    for (int k = 0; k < points; ++k) {
        double lam = lo * std::pow(hi / lo, double(k) / (points - 1));
        double cnt = double(std::upper_bound(s.begin(), s.end(), lam) - s.begin());
        if (cnt <= 0) continue;
        xs.push_back(std::log(lam));
        ys.push_back(std::log(cnt));
    }
    LineFit f = fit_line(xs, ys);
    w.exponent = f.slope;
    w.residual = f.residual;
    return w;
}

}  // namespace fraclab
