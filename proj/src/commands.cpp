#include "fraclab/commands.hpp"

#include "fraclab/heat.hpp"
#include "fraclab/products.hpp"
#include "fraclab/sobolev.hpp"
#include "fraclab/suite.hpp"
#include "fraclab/varcoef.hpp"
#include "fraclab/wavefront.hpp"

#include "json.hpp"

#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace fraclab {

namespace {

using json = nlohmann::ordered_json;

// keys that never change a result
const std::set<std::string> kPlumbing = {"cache_dir", "out", "threads", "format", "kernel_file"};

class Config {
public:
    Config(const std::string& command, const json& j) : command_(command), j_(j) {}

    template <class T>
    T get(const std::string& key, const T& def) {
        if (!j_.contains(key) || j_[key].is_null()) return def;
        try {
            return j_[key].get<T>();
        } catch (const std::exception&) {
            config_error(command_ + ": parameter '" + key + "' has the wrong type");
        }
    }
    bool has(const std::string& key) const { return j_.contains(key) && !j_[key].is_null(); }

    Kind kind() { return parse_kind(get<std::string>("kind", "gasket")); }
    BC bc(const std::string& def) { return parse_bc(get<std::string>("bc", def)); }
    std::string cache() { return get<std::string>("cache_dir", ""); }
    std::vector<int> levels(const std::vector<int>& def) {
        auto v = get<std::vector<int>>("levels", def);
        if (v.empty()) config_error(command_ + ": empty level list");
        return v;
    }

    void check_keys(const std::set<std::string>& allowed) const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!allowed.count(it.key()) && !kPlumbing.count(it.key()))
                config_error(command_ + ": unknown parameter '" + it.key() + "'");
    }

private:
    std::string command_;
    const json& j_;
};

struct Out {
    json result = json::object();
    std::vector<std::string> bases;  // hex hashes
    std::string csv, text;
    int status = 0;
};

EigenBasis solve(std::shared_ptr<const FractalGraph> g, BC bc, bool plain, bool keep_zero, const std::string& cache) {
    EigenOptions eo;
    eo.plain = plain;
    eo.keep_zero_mode = keep_zero;
    eo.cache_dir = cache;
    return eigensolve(std::move(g), bc, eo);
}

std::shared_ptr<const FractalGraph> graph_of(Kind k, int level) {
    return std::make_shared<const FractalGraph>(build(k, level));
}

// "d", a number, or an arithmetic expression in d such as "d+2*(d+1)"
double resolve_alpha(const std::string& text, double d) {
    Expr e(text, {{"d"}});
    cplx v = e.eval(std::vector<cplx>{cplx(d)});
    if (v.imag() != 0 || !std::isfinite(v.real())) config_error("alpha '" + text + "' is not a real number");
    return v.real();
}

json vec_json(const Vec& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

std::string set_text(const Vec& v) {
    std::string s = "{";
    for (int i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
    return s + "}";
}

void cmd_build(Config& c, Out& o) {
    Kind k = c.kind();
    int level = c.get<int>("level", 3);
    auto g = graph_of(k, level);
    o.result["kind"] = to_string(k);
    o.result["level"] = level;
    o.result["vertices"] = g->size();
    o.result["edges"] = g->edges.size();
    o.result["boundary"] = g->boundary;
    o.result["cells"] = g->cells.size();
    o.result["graph_hash"] = hex64(g->hash());
    o.result["measured_d"] = measured_d(*g);
    if (c.get<bool>("graph", false)) o.result["graph"] = json::parse(g->to_json());
    o.text = to_string(k) + " level " + std::to_string(level) + ": " + std::to_string(g->size()) + " vertices, " +
             std::to_string(g->edges.size()) + " edges, d = " + fmt(measured_d(*g)) + "\n";
}

void cmd_eig(Config& c, Out& o) {
    Kind k = c.kind();
    int level = c.get<int>("level", 1);
    BC bc = c.bc("dirichlet");
    bool plain = c.get<bool>("plain", false);
    bool keep = c.get<bool>("keep_zero_mode", false);
    int count = c.get<int>("count", -1);
    auto b = solve(graph_of(k, level), bc, plain, keep, c.cache());
    o.bases.push_back(hex64(b.hash()));
    Vec ev = count >= 0 && count < b.size() ? Vec(b.eigenvalues.head(count)) : b.eigenvalues;
    o.result["bc"] = to_string(bc);
    o.result["plain"] = plain;
    o.result["zero_mode_excluded"] = b.zero_mode_excluded;
    o.result["count"] = ev.size();
    o.result["eigenvalues"] = vec_json(ev);
    o.csv = "index,eigenvalue\n";
    for (int i = 0; i < ev.size(); ++i) o.csv += std::to_string(i) + "," + fmt(ev[i]) + "\n";
    o.text = set_text(ev) + "\n";
}

void cmd_heat_fit(Config& c, Out& o) {
    Kind k = c.kind();
    int level = c.get<int>("level", 5);
    BC bc = c.bc("dirichlet");
    double fraction = c.get<double>("fraction", 0.5);
    int pairs_n = c.get<int>("pairs", 200);
    auto seed = c.get<std::uint64_t>("seed", 1);
    auto g = graph_of(k, level);
    auto b = solve(g, bc, false, false, c.cache());
    o.bases.push_back(hex64(b.hash()));
    Mat R = resistance_matrix(*g);
    const double d = measured_d(*g);
    auto ts = scaling_window(b);
    auto rows = bulk_rows(b, R, fraction);
    auto f = fit_on_diagonal(b, ts, rows);
    auto w = weyl_fit(b.eigenvalues, 1.0 / f.t_hi, 1.0 / f.t_lo);
    Rng rng(seed);
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < pairs_n; ++i) pairs.push_back({rng.index(b.rows()), rng.index(b.rows())});
    auto sg = fit_subgaussian(b, R, ts, pairs, d);
    o.result["d"] = d;
    o.result["beta"] = f.beta;
    o.result["beta_spread"] = f.spread;
    o.result["t_window"] = {f.t_lo, f.t_hi};
    o.result["bulk_rows"] = rows.size();
    o.result["narrow_window"] = f.narrow_window;
    o.result["weyl_exponent"] = w.exponent;
    o.result["reference"] = d / (d + 1.0);
    o.result["subgaussian"] = {{"c1", sg.c1}, {"c2", sg.c2}, {"gamma", sg.gamma}, {"used", sg.used},
                               {"excluded", sg.excluded.size()}, {"residual_max", sg.residual_max}};
    o.text = "beta " + fmt(f.beta) + " (Weyl " + fmt(w.exponent) + ", d/(d+1) " + fmt(d / (d + 1.0)) + "), gamma " +
             fmt(sg.gamma) + "\n";
}

std::vector<std::string> symbols(Config& c, const std::vector<std::string>& def) {
    auto v = c.get<std::vector<std::string>>("symbols", def);
    if (v.empty()) config_error("no symbols given");
    return v;
}

void cmd_symbol_verify(Config& c, Out& o) {
    Kind k = c.kind();
    int level = c.get<int>("level", 4);
    BC bc = c.bc("neumann");
    int k_max = c.get<int>("k_max", 4);
    double rho = c.get<double>("rho", 1.0);
    auto syms = symbols(c, {"ratio"});
    bool has_order = c.has("order");
    double order = c.get<double>("order", 0.0);
    auto g = graph_of(k, level);
    auto b = solve(g, bc, false, false, c.cache());
    o.bases.push_back(hex64(b.hash()));
    const double d = measured_d(*g);
    auto grid = spectrum_grid(b);
    json arr = json::array();
    o.csv = "symbol,k,C,argmax\n";
    for (const auto& s : syms) {
        Symbol p = parse_symbol(s);
        double m = has_order ? order : p.order(d);
        auto r = verify_symbol_class(p, m, rho, k_max, grid, d);
        json e;
        e["symbol"] = s;
        e["m"] = m;
        e["C"] = r.C;
        e["argmax"] = r.argmax;
        e["finite"] = r.finite;
        e["stable"] = r.stable;
        e["passes"] = r.passes;
        e["closed_form"] = r.closed_form;
        arr.push_back(e);
        for (std::size_t i = 0; i < r.C.size(); ++i)
            o.csv += s + "," + std::to_string(i) + "," + fmt(r.C[i]) + "," + fmt(r.argmax[i]) + "\n";
        o.text += s + ": m = " + fmt(m) + (r.passes ? "  in class" : "  NOT in class") + "\n";
        if (!r.passes) o.status = 1;
    }
    o.result["d"] = d;
    o.result["symbols"] = arr;
}

void cmd_kernel_decay(Config& c, Out& o) {
    Kind k = c.kind();
    BC bc = c.bc("neumann");
    auto levels = c.levels({3, 4, 5});
    auto syms = symbols(c, {"ratio"});
    std::string alpha_s = c.get<std::string>("alpha", "d");
    int l = c.get<int>("l", 0), kk = c.get<int>("k", 0);
    double growth_max = c.get<double>("max_growth", 2.0);
    json rows = json::array();
    o.csv = "symbol,level,alpha,sup,argmax_r,admissible,exclusion,growth\n";
    for (const auto& s : syms) {
        Symbol p = parse_symbol(s);
        double prev = NAN;
        for (int L : levels) {
            auto g = graph_of(k, L);
            auto b = solve(g, bc, false, false, c.cache());
            o.bases.push_back(hex64(b.hash()));
            const double d = measured_d(*g);
            const double alpha = resolve_alpha(alpha_s, d);
            Mat R = resistance_matrix(*g);
            auto rep = decay_report(kernel(p, b), b, R, alpha, l, kk);
            double growth = std::isnan(prev) ? NAN : rep.sup / prev;
            if (growth > growth_max) o.status = 1;
            json e = {{"symbol", s},           {"level", L},           {"alpha", alpha},
                      {"sup", rep.sup},        {"argmax_r", rep.argmax_r}, {"admissible", rep.admissible},
                      {"exclusion", rep.exclusion}};
            e["growth"] = std::isnan(growth) ? json(nullptr) : json(growth);
            rows.push_back(e);
            o.csv += s + "," + std::to_string(L) + "," + fmt(alpha) + "," + fmt(rep.sup) + "," + fmt(rep.argmax_r) +
                     "," + std::to_string(rep.admissible) + "," + fmt(rep.exclusion) + "," +
                     (std::isnan(growth) ? "" : fmt(growth)) + "\n";
            prev = rep.sup;
        }
    }
    o.result["l"] = l;
    o.result["k"] = kk;
    o.result["rows"] = rows;
    o.text = o.csv;
}

void cmd_sobolev(Config& c, Out& o) {
    Kind k = c.kind();
    int level = c.get<int>("level", 4);
    BC bc = c.bc("neumann");
    auto ss = c.get<std::vector<double>>("s", {0.5, 1.0});
    double p = c.get<double>("p", 2.0);
    int trials = c.get<int>("trials", 20);
    auto seed = c.get<std::uint64_t>("seed", 1);
    auto syms = symbols(c, {"bessel:-1", "ratio"});
    auto g = graph_of(k, level);
    auto b = solve(g, bc, false, true, c.cache());
    o.bases.push_back(hex64(b.hash()));
    const double d = measured_d(*g);
    Rng rng(seed);
    json arr = json::array();
    for (double s : ss) {
        CVec u = rng.normal_vec(b.rows()).cast<cplx>();
        double a = hs_norm(u, s, b, d), e = lp_norm(b, bessel_power(u, s, b, d), 2);
        json row = {{"s", s}, {"hs_identity_error", std::abs(a - e) / e}};
        json ops = json::array();
        for (const auto& name : syms) {
            Symbol q = parse_symbol(name);
            auto ob = op_bound_hs(q, q.order(d), s, b, d);
            ops.push_back({{"symbol", name}, {"C", ob.C}, {"argmax", ob.argmax}, {"argmax_lambda", ob.argmax_lambda}});
        }
        row["op_bounds"] = ops;
        if (s < d / p) {
            auto er = embedding_check(s, p, NAN, b, d, trials, seed);
            row["embedding"] = {{"q", er.q}, {"max_ratio", er.max_ratio}, {"worst", er.worst}, {"trials", er.trials}};
        } else {
            row["embedding"] = nullptr;
        }
        arr.push_back(row);
        o.text += "s = " + fmt(s) + ": identity error " + fmt(std::abs(a - e) / e) + "\n";
    }
    o.result["d"] = d;
    o.result["p"] = p;
    o.result["rows"] = arr;
}

void cmd_product(Config& c, Out& o) {
    Kind k = c.kind();
    BC bc = c.bc("neumann");
    auto levels = c.levels({2, 3});
    std::string sym = c.get<std::string>("symbol", "riesz:1");
    auto seed = c.get<std::uint64_t>("seed", 1);
    Symbol2 p = parse_symbol2(sym);
    json rows = json::array();
    o.csv = "level,variant,sup,r1,r2,admissible\n";
    for (int L : levels) {
        auto g = graph_of(k, L);
        auto b = std::make_shared<const EigenBasis>(solve(g, bc, false, false, c.cache()));
        o.bases.push_back(hex64(b->hash()));
        auto pb = product_basis(b, b);
        const double d = measured_d(*g);
        Rng rng(seed);
        CMat U(b->rows(), b->rows());
        for (int i = 0; i < U.rows(); ++i)
            for (int j = 0; j < U.cols(); ++j) U(i, j) = cplx(rng.normal(), rng.normal());
        U = pb.synthesize(pb.coefficients(U));
        CMat S = apply2(parse_symbol2("riesz:1"), pb, U) + apply2(parse_symbol2("riesz:2"), pb, U);
        double rs = (S - U).cwiseAbs().maxCoeff() / U.cwiseAbs().maxCoeff();
        if (rs > 1e-12) o.status = 1;
        Mat R = resistance_matrix(*g);
        json vs = json::array();
        for (const auto& pd : product_decay(p, pb, R, R, d, default_product_variants())) {
            vs.push_back({{"variant", pd.variant}, {"sup", pd.sup}, {"r1", pd.r1}, {"r2", pd.r2},
                          {"admissible", pd.admissible}});
            o.csv += std::to_string(L) + "," + pd.variant + "," + fmt(pd.sup) + "," + fmt(pd.r1) + "," + fmt(pd.r2) +
                     "," + std::to_string(pd.admissible) + "\n";
        }
        rows.push_back({{"level", L}, {"d", d}, {"riesz_sum_error", rs}, {"decay", vs}});
        if (L == levels.back() && c.has("kernel_file")) {
            std::string path = c.get<std::string>("kernel_file", "");
            write_kernel2(p, pb, path);
            o.result["kernel"] = {{"level", L}, {"rows", pb.rows1() * pb.rows2()},
                                  {"bytes", std::uintmax_t(std::filesystem::file_size(path))}};
        }
    }
    o.result["symbol"] = sym;
    o.result["rows"] = rows;
    o.text = o.csv;
}

void cmd_gaps(Config& c, Out& o) {
    Kind k = c.kind();
    int level = c.get<int>("level", 4);
    BC bc = c.bc("neumann");
    double min_width = c.get<double>("min_width", 0.05);
    int show = c.get<int>("max_cones", 20);
    auto g = graph_of(k, level);
    auto b = std::make_shared<const EigenBasis>(solve(g, bc, false, false, c.cache()));
    o.bases.push_back(hex64(b->hash()));
    auto pb = product_basis(b, b);
    const double d = measured_d(*g);
    auto rep = gap_cones(pb, min_width);
    json cones = json::array();
    o.csv = "a,eps,ratio_lo,ratio_hi,relative_width\n";
    for (std::size_t i = 0; i < rep.cones.size(); ++i) {
        const auto& gc = rep.cones[i];
        o.csv += fmt(gc.cone.a) + "," + fmt(gc.cone.eps) + "," + fmt(gc.ratio_lo) + "," + fmt(gc.ratio_hi) + "," +
                 fmt(gc.relative_width) + "\n";
        if (int(i) < show)
            cones.push_back({{"a", gc.cone.a}, {"eps", gc.cone.eps}, {"ratio_lo", gc.ratio_lo},
                             {"ratio_hi", gc.ratio_hi}, {"relative_width", gc.relative_width}});
    }
    o.result["pairs"] = rep.pairs;
    o.result["few_pairs"] = rep.few_pairs;
    o.result["cone_count"] = rep.cones.size();
    o.result["cones"] = cones;
    if (rep.cones.empty()) {
        o.status = 1;
        o.text = "no gap cones\n";
        return;
    }
    const GapCone* wide = &rep.cones.front();
    for (const auto& gc : rep.cones)
        if (gc.relative_width > wide->relative_width) wide = &gc;
    auto q = quasi_inverse_check(wide->cone.a, pb);
    Symbol2 p = parse_symbol2("diff:" + fmt(wide->cone.a));
    const double r_max = 4.0 * b->eigenvalues.maxCoeff() * (1.0 + wide->cone.a);
    Symbol2 ext = elliptic_extension(p, d + 1.0, wide->cone, 1.0, d, r_max);
    auto ec = elliptic_check(ext, d + 1.0, 1.0, r_max, d);
    if (!(q.inf > 0) || !ec.passes) o.status = 1;
    o.result["widest"] = {{"a", wide->cone.a},
                          {"eps", wide->cone.eps},
                          {"quasi_inverse_inf", q.inf},
                          {"inverse_norm", q.op_norm},
                          {"extension_elliptic", ec.passes},
                          {"extension_c", ec.c}};
    o.text = std::to_string(rep.cones.size()) + " gap cones; widest at a = " + fmt(wide->cone.a) + ", quasi-inverse inf " +
             fmt(q.inf) + "\n";
}

json set_json(const std::set<std::pair<int, int>>& s) {
    json a = json::array();
    for (auto [r, k] : s) a.push_back({r, k});
    return a;
}

void cmd_wavefront(Config& c, Out& o) {
    int level = c.get<int>("level", 5);
    double n_max = c.get<double>("n_max", 1.0);
    auto P = wavefront_panel(level, n_max, c.cache());
    json cases = json::array();
    for (const auto& pc : P.cases)
        cases.push_back({{"sing1", pc.sing1},
                         {"sing2", pc.sing2},
                         {"match", pc.match},
                         {"flagged", pc.flagged},
                         {"expected", pc.expected},
                         {"monotone", pc.monotone},
                         {"elliptic_equal", pc.elliptic_equal},
                         {"scaling_equal", pc.scaling_equal}});
    o.result["level"] = P.level;
    o.result["d"] = P.d;
    o.result["n_max"] = P.n_max;
    o.result["series_eigenvalues"] = P.series_eigenvalues;
    o.result["monotone_symbols"] = P.monotone_symbols;
    o.result["cases"] = cases;
    o.result["localized_flags"] = set_json(P.localized_flags);
    o.result["localized_expected"] = set_json(P.localized_expected);
    o.result["smooth_flags"] = P.smooth_flags;
    o.result["passes"] = P.passes();
    if (!P.passes()) o.status = 1;
    o.text = std::string("wavefront panel ") + (P.passes() ? "reproduces" : "does NOT reproduce") +
             " the tensor, localized and smooth references\n";
}

void cmd_varcoef(Config& c, Out& o) {
    Kind k = c.kind();
    auto levels = c.levels({3, 4, 5});
    std::string expr = c.get<std::string>("symbol", "(1+h0)*l/(1+l)");
    double q = c.get<double>("q", 2.0);
    int trials = c.get<int>("trials", 10);
    auto seed = c.get<std::uint64_t>("seed", 1);
    json rows = json::array();
    o.csv = "level,alpha,n,route_difference,max_ratio,bound_proxy,sup\n";
    for (int L : levels) {
        auto g = graph_of(k, L);
        auto b = solve(g, BC::Neumann, false, true, c.cache());
        o.bases.push_back(hex64(b.hash()));
        const double d = measured_d(*g);
        VarSymbol p = parse_varsymbol(expr, b);
        auto sf = supnorm_exponent_fit(b);
        Rng rng(seed);
        CVec u = rng.normal_vec(b.rows()).cast<cplx>();
        CVec a = apply_varcoef(p, b, u);
        auto e = apply_varcoef_expansion(p, b, u, expansion_index(sf.alpha));
        double rd = (a - e.value).norm() / a.norm();
        auto lq = lq_bound_check(p, b, q, trials, seed);
        Mat R = resistance_matrix(*g);
        auto dr = decay_report(kernel_varcoef(p, b), b, R, d);
        if (rd > 1e-9) o.status = 1;
        json row = {{"level", L},          {"d", d},
                    {"alpha", sf.alpha},   {"c", sf.c},
                    {"n", e.n},            {"route_difference", rd},
                    {"max_ratio", lq.max_ratio}, {"bound_proxy", lq.bound_proxy},
                    {"sup", dr.sup}};
        row["exact_l2"] = std::isnan(lq.exact_l2) ? json(nullptr) : json(lq.exact_l2);
        rows.push_back(row);
        o.csv += std::to_string(L) + "," + fmt(sf.alpha) + "," + std::to_string(e.n) + "," + fmt(rd) + "," +
                 fmt(lq.max_ratio) + "," + fmt(lq.bound_proxy) + "," + fmt(dr.sup) + "\n";
    }
    o.result["symbol"] = expr;
    o.result["q"] = q;
    o.result["rows"] = rows;
    o.text = o.csv;
}

void cmd_suite(Config& c, Out& o) {
    SuiteOptions so;
    so.level = c.get<int>("level", 3);
    so.seed = c.get<std::uint64_t>("seed", 1);
    so.cache_dir = c.cache();
    auto only = c.get<std::vector<int>>("criteria", {});
    std::vector<CheckResult> res;
    if (only.empty())
        res = run_suite(so);
    else
        for (int id : only) res.push_back(run_criterion(id, so));
    json checks = json::array();
    o.csv = "criterion,name,result\n";
    for (const auto& r : res) {
        json m = json::object();
        for (const auto& [key, v] : r.metrics) m[key] = v;
        checks.push_back({{"criterion", r.id},
                          {"name", r.name},
                          {"pass", r.pass},
                          {"detail", r.detail},
                          {"metrics", m},
                          {"info", r.info}});
        char line[160];
        std::snprintf(line, sizeof line, "%2d  %-24s %s\n", r.id, r.name.c_str(), r.pass ? "PASS" : "FAIL");
        o.text += line;
        if (!r.pass) {
            o.text += "    " + r.detail + "\n";
            o.status = 1;
        }
        o.csv += std::to_string(r.id) + "," + r.name + "," + (r.pass ? "pass" : "fail") + "\n";
    }
    o.result["level"] = so.level;
    o.result["checks"] = checks;
}

struct Command {
    std::function<void(Config&, Out&)> run;
    std::set<std::string> keys;
};

const std::map<std::string, Command>& registry() {
    static const std::map<std::string, Command> r = {
        {"build", {cmd_build, {"kind", "level", "graph"}}},
        {"eig", {cmd_eig, {"kind", "level", "bc", "plain", "keep_zero_mode", "count"}}},
        {"heat-fit", {cmd_heat_fit, {"kind", "level", "bc", "fraction", "pairs", "seed"}}},
        {"symbol-verify", {cmd_symbol_verify, {"kind", "level", "bc", "k_max", "rho", "symbols", "order"}}},
        {"kernel-decay", {cmd_kernel_decay, {"kind", "bc", "levels", "symbols", "alpha", "l", "k", "max_growth"}}},
        {"sobolev", {cmd_sobolev, {"kind", "level", "bc", "s", "p", "trials", "seed", "symbols"}}},
        {"product", {cmd_product, {"kind", "bc", "levels", "symbol", "seed", "kernel_file"}}},
        {"gaps", {cmd_gaps, {"kind", "level", "bc", "min_width", "max_cones"}}},
        {"wavefront", {cmd_wavefront, {"level", "n_max"}}},
        {"varcoef", {cmd_varcoef, {"kind", "levels", "symbol", "q", "trials", "seed"}}},
        {"suite", {cmd_suite, {"level", "seed", "criteria"}}}};
    return r;
}

json parse_config(const std::string& text) {
    json j;
    try {
        j = text.empty() ? json::object() : json::parse(text);
    } catch (const std::exception& e) {
        config_error(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) config_error("config must be a JSON object");
    return j;
}

json result_part(const json& j) {
    json r = json::object();
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!kPlumbing.count(it.key())) r[it.key()] = it.value();
    return r;
}

}  // namespace

std::vector<std::string> command_names() {
    return {"build", "eig", "heat-fit", "symbol-verify", "kernel-decay", "sobolev",
            "product", "gaps", "wavefront", "varcoef", "suite"};
}

std::string config_hash(const std::string& config_json) {
    return hex64(fnv1a(result_part(parse_config(config_json)).dump()));
}

CommandResult run_command(const std::string& command, const std::string& config_json) {
    auto it = registry().find(command);
    if (it == registry().end()) config_error("unknown command '" + command + "'");
    json cfg = parse_config(config_json);
    Config c(command, cfg);
    c.check_keys(it->second.keys);
    Out o;
    it->second.run(c, o);
    json rep;
    rep["command"] = command;
    rep["config"] = result_part(cfg);
    rep["config_hash"] = hex64(fnv1a(rep["config"].dump()));
    rep["basis_hashes"] = o.bases;
    rep["status"] = o.status == 0 ? "ok" : "failed";
    rep["result"] = o.result;
    CommandResult r;
    r.status = o.status;
    r.json = rep.dump(2) + "\n";
    r.csv = o.csv;
    r.text = o.text;
    return r;
}

}  // namespace fraclab
