#include "fraclab/graph.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace fraclab {

Kind parse_kind(const std::string& s) {
    if (s == "gasket") return Kind::Gasket;
    if (s == "circle") return Kind::Circle;
    if (s == "gasket-double-cover" || s == "double-cover") return Kind::DoubleCover;
    config_error("unknown fractal kind '" + s + "'");
}

std::string to_string(Kind k) {
    switch (k) {
        case Kind::Gasket: return "gasket";
        case Kind::Circle: return "circle";
        case Kind::DoubleCover: return "gasket-double-cover";
    }
    return "?";
}

bool FractalGraph::is_boundary(int v) const {
    return std::find(boundary.begin(), boundary.end(), v) != boundary.end();
}

Mat FractalGraph::energy(bool plain) const {
    const int n = size();
    Mat E = Mat::Zero(n, n);
    for (const auto& e : edges) {
        double c = plain ? 1.0 : e.conductance;
        E(e.i, e.i) += c;
        E(e.j, e.j) += c;
        E(e.i, e.j) -= c;
        E(e.j, e.i) -= c;
    }
    return E;
}

std::string FractalGraph::to_json() const {
    nlohmann::ordered_json j;
    j["kind"] = fraclab::to_string(kind);
    j["level"] = level;
    j["vertices"] = words;
    auto ed = nlohmann::ordered_json::array();
    for (const auto& e : edges) ed.push_back({e.i, e.j, e.conductance});
    j["edges"] = ed;
    j["boundary"] = boundary;
    j["mass"] = mass;
    return j.dump();
}

std::uint64_t FractalGraph::hash() const { return fnv1a(to_json()); }

std::vector<int> FractalGraph::cell_vertices(const std::string& prefix) const {
    std::set<int> vs;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        if (cell_words[c].compare(0, prefix.size(), prefix) == 0)
            for (int v : cells[c]) vs.insert(v);
    }
    return {vs.begin(), vs.end()};
}

std::array<int, 3> FractalGraph::cell_corners(const std::string& prefix) const {
    // A cell's corners are the extreme vertices of its sub-cells: corner i is the
    // i-th corner of the sub-cell whose word is prefix followed by i repeated.
    std::array<int, 3> out{-1, -1, -1};
    std::size_t depth = cell_words.empty() ? 0 : cell_words[0].size();
    if (prefix.size() > depth) config_error("cell prefix deeper than the graph level");
    for (int i = 0; i < 3; ++i) {
        std::string w = prefix + std::string(depth - prefix.size(), char('0' + i));
        auto it = std::find(cell_words.begin(), cell_words.end(), w);
        if (it == cell_words.end()) config_error("no cell with prefix '" + prefix + "'");
        out[i] = cells[std::size_t(it - cell_words.begin())][std::size_t(i)];
    }
    return out;
}

namespace {

using Coord = std::array<long long, 3>;

FractalGraph build_gasket(int m) {
    FractalGraph g;
    g.kind = Kind::Gasket;
    g.level = m;
    const long long N = 1LL << m;
    long long ncells = 1;
    for (int k = 0; k < m; ++k) ncells *= 3;

    std::map<Coord, std::string> canon;
    std::vector<std::array<Coord, 3>> cell_coords;
    std::vector<std::string> cell_words;
    for (long long c = 0; c < ncells; ++c) {
        std::string w(std::size_t(m), '0');
        long long t = c;
        for (int k = m - 1; k >= 0; --k) {
            w[std::size_t(k)] = char('0' + t % 3);
            t /= 3;
        }
        std::array<Coord, 3> cs;
        for (int i = 0; i < 3; ++i) {
            Coord x{0, 0, 0};
            for (int k = 0; k < m; ++k) x[std::size_t(w[std::size_t(k)] - '0')] += N >> (k + 1);
            x[std::size_t(i)] += N >> m;
            cs[std::size_t(i)] = x;
            std::string vw = w + char('0' + i);
            auto it = canon.find(x);
            if (it == canon.end() || vw < it->second) canon[x] = vw;
        }
        cell_coords.push_back(cs);
        cell_words.push_back(w);
    }
    std::vector<std::pair<std::string, Coord>> order;
    for (const auto& [x, w] : canon) order.emplace_back(w, x);
    std::sort(order.begin(), order.end());
    std::map<Coord, int> idx;
    for (std::size_t i = 0; i < order.size(); ++i) {
        idx[order[i].second] = int(i);
        g.words.push_back(order[i].first);
        const auto& x = order[i].second;
        double fx = (double(x[1]) + 0.5 * double(x[2])) / double(N);
        double fy = (std::sqrt(3.0) / 2.0) * double(x[2]) / double(N);
        g.coords.push_back({fx, fy});
    }
    const double cond = std::pow(5.0 / 3.0, m);
    std::vector<Edge> edges;
    for (std::size_t c = 0; c < cell_coords.size(); ++c) {
        std::array<int, 3> v{idx[cell_coords[c][0]], idx[cell_coords[c][1]], idx[cell_coords[c][2]]};
        g.cells.push_back(v);
        g.cell_words.push_back(cell_words[c]);
        for (int a = 0; a < 3; ++a)
            for (int b = a + 1; b < 3; ++b)
                edges.push_back({std::min(v[std::size_t(a)], v[std::size_t(b)]),
                                 std::max(v[std::size_t(a)], v[std::size_t(b)]), cond});
    }
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        return a.i != b.i ? a.i < b.i : a.j < b.j;
    });
    g.edges = edges;
    g.boundary = {idx[Coord{N, 0, 0}], idx[Coord{0, N, 0}], idx[Coord{0, 0, N}]};
    std::sort(g.boundary.begin(), g.boundary.end());
    g.mass = mass_weights(g);
    return g;
}

FractalGraph build_circle(int n) {
    FractalGraph g;
    g.kind = Kind::Circle;
    g.level = n;
    int width = int(std::to_string(n - 1).size());
    for (int i = 0; i < n; ++i) {
        std::string s = std::to_string(i);
        g.words.push_back(std::string(std::size_t(width) - s.size(), '0') + s);
        double a = 2.0 * M_PI * i / n;
        g.coords.push_back({std::cos(a), std::sin(a)});
    }
    for (int i = 0; i < n; ++i) {
        int j = (i + 1) % n;
        g.edges.push_back({std::min(i, j), std::max(i, j), double(n)});
    }
    std::sort(g.edges.begin(), g.edges.end(), [](const Edge& a, const Edge& b) {
        return a.i != b.i ? a.i < b.i : a.j < b.j;
    });
    g.mass = mass_weights(g);
    return g;
}

FractalGraph build_double_cover(int m) {
    FractalGraph k = build_gasket(m);
    FractalGraph g;
    g.kind = Kind::DoubleCover;
    g.level = m;
    const int n = k.size();
    std::vector<int> mapB(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        g.words.push_back("a" + k.words[std::size_t(i)]);
        g.coords.push_back(k.coords[std::size_t(i)]);
    }
    int next = n;
    for (int i = 0; i < n; ++i) {
        if (k.is_boundary(i)) {
            mapB[std::size_t(i)] = i;
        } else {
            mapB[std::size_t(i)] = next++;
            g.words.push_back("b" + k.words[std::size_t(i)]);
            g.coords.push_back(k.coords[std::size_t(i)]);
        }
    }
    std::map<std::pair<int, int>, double> em;
    for (const auto& e : k.edges) {
        em[{e.i, e.j}] += e.conductance;
        int a = mapB[std::size_t(e.i)], b = mapB[std::size_t(e.j)];
        em[{std::min(a, b), std::max(a, b)}] += e.conductance;
    }
    for (const auto& [ij, c] : em) g.edges.push_back({ij.first, ij.second, c});
    for (std::size_t c = 0; c < k.cells.size(); ++c) {
        g.cells.push_back(k.cells[c]);
        g.cell_words.push_back("a" + k.cell_words[c]);
    }
    for (std::size_t c = 0; c < k.cells.size(); ++c) {
        const auto& v = k.cells[c];
        g.cells.push_back({mapB[std::size_t(v[0])], mapB[std::size_t(v[1])], mapB[std::size_t(v[2])]});
        g.cell_words.push_back("b" + k.cell_words[c]);
    }
    g.mass = mass_weights(g);
    return g;
}

long long vertex_count(Kind kind, int level) {
    if (kind == Kind::Circle) return level;
    long long p = 1;
    for (int k = 0; k < level && p < (1LL << 40); ++k) p *= 3;
    long long nk = 3 * (p + 1) / 2;
    return kind == Kind::Gasket ? nk : 2 * nk - 3;
}

}  // namespace

FractalGraph build(Kind kind, int level, const BuildOptions& opt) {
    if (level < 0) config_error("level must be >= 0");
    if (kind == Kind::Circle && level < 3) config_error("circle requires n >= 3");
    if ((kind != Kind::Circle && level > 30) || vertex_count(kind, level) > opt.max_vertices)
        config_error("vertex count for " + to_string(kind) + " level " + std::to_string(level) +
                     " exceeds the cap of " + std::to_string(opt.max_vertices));
    switch (kind) {
        case Kind::Gasket: return build_gasket(level);
        case Kind::Circle: return build_circle(level);
        case Kind::DoubleCover: return build_double_cover(level);
    }
    config_error("unknown kind");
}

std::vector<double> mass_weights(const FractalGraph& g) {
    std::vector<double> m(std::size_t(g.size()), 0.0);
    if (g.kind == Kind::Circle) {
        std::fill(m.begin(), m.end(), 1.0 / g.size());
        return m;
    }
    const double share = 1.0 / (3.0 * double(g.cells.size()));
    for (const auto& c : g.cells)
        for (int v : c) m[std::size_t(v)] += share;
    return m;
}

double resistance(const FractalGraph& g, int x, int y) {
    const int n = g.size();
    if (x < 0 || y < 0 || x >= n || y >= n) config_error("resistance: vertex out of range");
    if (x == y) return 0.0;
    Mat E = g.energy();
    std::vector<int> free;
    for (int v = 0; v < n; ++v)
        if (v != x && v != y) free.push_back(v);
    Vec u = Vec::Zero(n);
    u[y] = 1.0;
    if (!free.empty()) {
        const int f = int(free.size());
        Mat A(f, f);
        Vec b(f);
        for (int a = 0; a < f; ++a) {
            b[a] = -E(free[std::size_t(a)], y);
            for (int c = 0; c < f; ++c) A(a, c) = E(free[std::size_t(a)], free[std::size_t(c)]);
        }
        Eigen::LDLT<Mat> ldlt(A);
        Vec s = ldlt.solve(b);
        if (ldlt.info() != Eigen::Success || !s.allFinite() || (A * s - b).norm() > 1e-8 * (1.0 + b.norm()))
            numeric_error("resistance: singular solve, graph is disconnected");
        for (int a = 0; a < f; ++a) u[free[std::size_t(a)]] = s[a];
    }
    double energy = u.dot(E * u);
    if (!(energy > 0)) numeric_error("resistance: zero energy, graph is disconnected");
    return 1.0 / energy;
}

Mat resistance_matrix(const FractalGraph& g) {
    const int n = g.size();
    Mat A = g.energy();
    A.array() += 1.0 / n;
    Eigen::LLT<Mat> llt(A);
    if (llt.info() != Eigen::Success) numeric_error("resistance: energy matrix singular on the complement of constants, graph is disconnected");
    Mat Lp = llt.solve(Mat::Identity(n, n));
    Lp.array() -= 1.0 / n;
    Mat R(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) R(i, j) = i == j ? 0.0 : std::max(0.0, Lp(i, i) + Lp(j, j) - 2.0 * Lp(i, j));
    // exact symmetry
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) R(j, i) = R(i, j);
    return R;
}

double cell_diameter(const FractalGraph& g, const Mat& R) {
    double d = 0;
    if (g.cells.empty()) {
        for (const auto& e : g.edges) d = std::max(d, R(e.i, e.j));
        return d;
    }
    for (const auto& c : g.cells)
        for (int a = 0; a < 3; ++a)
            for (int b = a + 1; b < 3; ++b) d = std::max(d, R(c[std::size_t(a)], c[std::size_t(b)]));
    return d;
}

DoublingReport doubling_report(const FractalGraph& g, const Mat& R, int sample_count,
                               const std::vector<double>& radii, std::uint64_t seed) {
    DoublingReport rep;
    for (double r : radii)
        if (!(r > 0)) config_error("doubling_report: radii must be positive");
    Rng rng(seed);
    const int n = g.size();
    auto ball = [&](int x, double r, int* count) {
        double s = 0;
        int c = 0;
        for (int y = 0; y < n; ++y)
            if (R(x, y) <= r) {
                s += g.mass[std::size_t(y)];
                ++c;
            }
        if (count) *count = c;
        return s;
    };
    for (int s = 0; s < sample_count; ++s) {
        int x = rng.index(n);
        for (double r : radii) {
            int cnt = 0;
            double b1 = ball(x, r, &cnt);
            double b2 = ball(x, 2 * r, nullptr);
            DoublingSample ds{x, r, b2 / b1, cnt <= 1};
            if (!ds.below_resolution) rep.max_ratio = std::max(rep.max_ratio, ds.ratio);
            rep.samples.push_back(ds);
        }
    }
    return rep;
}

double measured_d(const FractalGraph& g) {
    if (g.kind == Kind::Circle) {
        int n = g.level;
        FractalGraph a = build(Kind::Circle, n, {1 << 30});
        FractalGraph b = build(Kind::Circle, 2 * n, {1 << 30});
        for (auto* h : {&a, &b})
            for (auto& e : h->edges) e.conductance = 1.0;
        double ra = resistance(a, 0, n / 2), rb = resistance(b, 0, n);
        return std::log(2.0) / std::log(rb / ra);
    }
    int l = std::min(g.level, 5);
    FractalGraph a = build(Kind::Gasket, l), b = build(Kind::Gasket, l + 1);
    for (auto* h : {&a, &b})
        for (auto& e : h->edges) e.conductance = 1.0;
    double ra = resistance(a, a.boundary[0], a.boundary[1]);
    double rb = resistance(b, b.boundary[0], b.boundary[1]);
    return std::log(3.0) / std::log(rb / ra);
}

DimensionReport measure_dimension(const FractalGraph& g, const Mat& R) {
    DimensionReport rep;
    rep.d_reference = g.kind == Kind::Circle ? 1.0 : std::log(3.0) / std::log(5.0 / 3.0);
    rep.d = measured_d(g);
    // ball-volume cross-check
    const int n = g.size();
    double lo = 2.0 * cell_diameter(g, R), hi = R.maxCoeff() / 4.0;
    if (hi > lo) {
        std::vector<double> xs, ys;
        for (int k = 0; k < 12; ++k) {
            double r = lo * std::pow(hi / lo, k / 11.0);
            double s = 0;
            for (int x = 0; x < n; ++x)
                for (int y = 0; y < n; ++y)
                    if (R(x, y) <= r) s += g.mass[std::size_t(y)];
            xs.push_back(std::log(r));
            ys.push_back(std::log(s / n));
        }
        rep.d_ball = fit_line(xs, ys).slope;
    }
    return rep;
}

}  // namespace fraclab
