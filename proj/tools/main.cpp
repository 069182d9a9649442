#include "fraclab/fraclab.h"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace {

using json = nlohmann::ordered_json;

struct Opts {
    std::string kind, bc, alpha, symbol, format = "text", cache_dir, out, config_file, mode, kernel_file;
    int level = -1, l = -1, k = -1, k_max = -1, trials = -1, threads = 1, pairs = -1, count = -1, max_cones = -1;
    bool plain = false, keep_zero = false, graph = false;
    long long seed = -1;
    std::vector<int> levels, criteria;
    std::vector<std::string> symbols;
    std::vector<double> s;
    double p = NAN, q = NAN, order = NAN, rho = NAN, n_max = NAN, min_width = NAN, fraction = NAN, max_growth = NAN;
};

// which flags each subcommand takes
const std::map<std::string, std::vector<std::string>> kFlags = {
    {"build", {"kind", "level", "graph"}},
    {"eig", {"kind", "level", "bc", "plain", "keep-zero-mode", "count"}},
    {"heat-fit", {"kind", "level", "bc", "fraction", "pairs", "seed"}},
    {"symbol-verify", {"kind", "level", "bc", "symbol", "order", "rho", "k-max"}},
    {"kernel-decay", {"kind", "bc", "levels", "symbol", "alpha", "l", "k", "max-growth"}},
    {"sobolev", {"kind", "level", "bc", "s", "p", "symbol", "trials", "seed"}},
    {"product", {"mode", "kind", "bc", "levels", "symbol1", "seed", "kernel-file"}},
    {"gaps", {"kind", "level", "bc", "min-width", "max-cones"}},
    {"wavefront", {"level", "n-max"}},
    {"varcoef", {"kind", "levels", "symbol1", "q", "trials", "seed"}},
    {"suite", {"level", "seed", "criteria"}},
};

const std::map<std::string, std::string> kHelp = {
    {"build", "build a graph and report sizes, dimension and doubling ratios"},
    {"eig", "eigenvalues of the measure-weighted Laplacian"},
    {"heat-fit", "on-diagonal and sub-Gaussian heat kernel fits, Weyl exponent"},
    {"symbol-verify", "symbol class constants on a dyadic grid"},
    {"kernel-decay", "off-diagonal kernel decay across levels"},
    {"sobolev", "Sobolev norms, operator bounds and embeddings"},
    {"product", "product-space multipliers: Riesz identity and kernel decay"},
    {"gaps", "spectral gaps and empty cones of the product spectrum"},
    {"wavefront", "wavefront estimates on the double cover panel"},
    {"varcoef", "variable-coefficient operators"},
    {"suite", "run the acceptance battery"},
};

void add_flags(CLI::App* sc, const std::vector<std::string>& names, Opts& o) {
    for (const auto& n : names) {
        if (n == "kind") sc->add_option("--kind", o.kind, "gasket | double-cover | circle");
        else if (n == "level") sc->add_option("--level", o.level, "approximation level (circle: vertex count)");
        else if (n == "levels") sc->add_option("--levels", o.levels, "level list, e.g. 3,4,5")->delimiter(',');
        else if (n == "bc") sc->add_option("--bc", o.bc, "dirichlet | neumann | none");
        else if (n == "plain") sc->add_flag("--plain", o.plain, "unit conductances and unit masses");
        else if (n == "keep-zero-mode") sc->add_flag("--keep-zero-mode", o.keep_zero, "keep the constant mode");
        else if (n == "graph") sc->add_flag("--graph", o.graph, "embed the full graph in the report");
        else if (n == "count") sc->add_option("--count", o.count, "report only the lowest eigenvalues");
        else if (n == "symbol") sc->add_option("--symbol", o.symbols, "symbol spec (repeatable)")->delimiter(',');
        else if (n == "symbol1") sc->add_option("--symbol", o.symbol, "symbol spec");
        else if (n == "alpha") sc->add_option("--alpha", o.alpha, "weight exponent, e.g. d or d+2*(d+1)");
        else if (n == "l") sc->add_option("-l,--lap-x", o.l, "discrete Laplacians applied in x");
        else if (n == "k") sc->add_option("-k,--lap-y", o.k, "discrete Laplacians applied in y");
        else if (n == "order") sc->add_option("--order", o.order, "declared order m");
        else if (n == "rho") sc->add_option("--rho", o.rho, "type rho");
        else if (n == "k-max") sc->add_option("--k-max", o.k_max, "highest scaled derivative");
        else if (n == "s") sc->add_option("--s", o.s, "Sobolev orders")->delimiter(',');
        else if (n == "p") sc->add_option("--p", o.p, "Lebesgue exponent");
        else if (n == "q") sc->add_option("--q", o.q, "Lebesgue exponent of the bound check");
        else if (n == "trials") sc->add_option("--trials", o.trials, "random trials");
        else if (n == "seed") sc->add_option("--seed", o.seed, "random seed");
        else if (n == "fraction") sc->add_option("--fraction", o.fraction, "bulk sample fraction");
        else if (n == "pairs") sc->add_option("--pairs", o.pairs, "sampled vertex pairs");
        else if (n == "n-max") sc->add_option("--n-max", o.n_max, "decay order separating smooth from singular");
        else if (n == "min-width") sc->add_option("--min-width", o.min_width, "minimum relative gap width");
        else if (n == "max-cones") sc->add_option("--max-cones", o.max_cones, "cones listed in the JSON report");
        else if (n == "max-growth") sc->add_option("--max-growth", o.max_growth, "allowed growth per level");
        else if (n == "mode")
            sc->add_option("mode", o.mode, "decay (default) or kernel: also stream the top-level kernel to a file")
                ->check(CLI::IsMember({"decay", "kernel"}));
        else if (n == "kernel-file") sc->add_option("--kernel-file", o.kernel_file, "kernel output path");
        else if (n == "criteria") sc->add_option("--criteria", o.criteria, "subset of criteria")->delimiter(',');
    }
}

json to_config(const Opts& o, long long global_seed) {
    json c = o.config_file.empty() ? json::object() : [&] {
        std::ifstream f(o.config_file);
        if (!f) throw CLI::ValidationError("--config", "cannot read " + o.config_file);
        return json::parse(f);
    }();
    auto put = [&](const char* key, auto v, bool present) {
        if (present) c[key] = v;
    };
    put("kind", o.kind, !o.kind.empty());
    put("level", o.level, o.level >= 0);
    put("levels", o.levels, !o.levels.empty());
    put("bc", o.bc, !o.bc.empty());
    put("plain", o.plain, o.plain);
    put("keep_zero_mode", o.keep_zero, o.keep_zero);
    put("graph", o.graph, o.graph);
    put("count", o.count, o.count >= 0);
    put("symbols", o.symbols, !o.symbols.empty());
    put("symbol", o.symbol, !o.symbol.empty());
    put("alpha", o.alpha, !o.alpha.empty());
    put("l", o.l, o.l >= 0);
    put("k", o.k, o.k >= 0);
    put("order", o.order, !std::isnan(o.order));
    put("rho", o.rho, !std::isnan(o.rho));
    put("k_max", o.k_max, o.k_max >= 0);
    put("s", o.s, !o.s.empty());
    put("p", o.p, !std::isnan(o.p));
    put("q", o.q, !std::isnan(o.q));
    put("trials", o.trials, o.trials >= 0);
    put("fraction", o.fraction, !std::isnan(o.fraction));
    put("pairs", o.pairs, o.pairs >= 0);
    put("n_max", o.n_max, !std::isnan(o.n_max));
    put("min_width", o.min_width, !std::isnan(o.min_width));
    put("max_cones", o.max_cones, o.max_cones >= 0);
    put("max_growth", o.max_growth, !std::isnan(o.max_growth));
    put("criteria", o.criteria, !o.criteria.empty());
    long long seed = o.seed >= 0 ? o.seed : global_seed;
    put("seed", static_cast<unsigned long long>(seed), seed >= 0);
    put("cache_dir", o.cache_dir, !o.cache_dir.empty());
    if (o.mode == "kernel" || !o.kernel_file.empty()) {
        std::filesystem::path kf = o.kernel_file;
        if (kf.empty()) kf = std::filesystem::path(o.out.empty() ? "." : o.out) / "product_kernel.bin";
        if (!o.out.empty()) std::filesystem::create_directories(o.out);
        c["kernel_file"] = kf.string();
    }
    return c;
}

bool write_file(const std::filesystem::path& p, const std::string& data) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    f << data;
    return bool(f);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fraclab: spectral analysis and pseudo-differential operators on fractal graphs"};
    app.require_subcommand(1);
    app.fallthrough();
    Opts o;
    long long global_seed = -1;
    app.add_option("--cache-dir", o.cache_dir, "eigenbasis cache directory");
    app.add_option("--out", o.out, "directory for report files");
    app.add_option("--seed", global_seed, "random seed for every command");
    app.add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--format", o.format, "stdout format; report files always get json and csv")->check(CLI::IsMember({"json", "csv", "text"}));
    app.add_option("--config", o.config_file, "JSON file with command parameters (flags override)");
    std::map<CLI::App*, std::string> subs;
    for (const auto& [name, flags] : kFlags) {
        auto* sc = app.add_subcommand(name, kHelp.at(name));
        add_flags(sc, flags, o);
        subs[sc] = name;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    std::string command;
    for (auto& [sc, name] : subs)
        if (sc->parsed()) command = name;

    json cfg;
    try {
        cfg = to_config(o, global_seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    fraclab_set_threads(o.threads);
    fraclab_report* rep = nullptr;
    fraclab_status st = fraclab_run(command.c_str(), cfg.dump().c_str(), &rep);
    if (!rep) {
        std::cerr << "error: " << fraclab_last_error() << "\n";
        return st == FRACLAB_CONFIG_ERROR ? 2 : 1;
    }
    std::string js = fraclab_report_json(rep), csv = fraclab_report_csv(rep), text = fraclab_report_text(rep);
    int status = fraclab_report_status(rep);
    fraclab_report_free(rep);

    if (!o.out.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(o.out, ec);
        std::filesystem::path dir(o.out);
        if (ec || !write_file(dir / (command + ".json"), js) ||
            (!csv.empty() && !write_file(dir / (command + ".csv"), csv))) {
            std::cerr << "error: cannot write reports to " << o.out << "\n";
            return 2;
        }
    }
    if (o.format == "csv" && !csv.empty())
        std::cout << csv;
    else if (o.format == "json")
        std::cout << js;
    else
        std::cout << text;
    return status == 0 ? 0 : 1;
}
