#include "doctest.h"
#include "json.hpp"

#include "fraclab/fraclab.h"

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using json = nlohmann::json;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run cli(const std::string& args) {
    std::string cmd = std::string(FRACLAB_CLI_PATH) + " " + args + " 2>/dev/null";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p);
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    int st = pclose(p);
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("C API: graphs and resistance") {
    fraclab_graph* g = nullptr;
    REQUIRE(fraclab_graph_build("gasket", 3, &g) == FRACLAB_OK);
    CHECK(fraclab_graph_vertex_count(g) == 42);
    double r = 0;
    CHECK(fraclab_graph_resistance(g, 0, 1, &r) == FRACLAB_OK);
    CHECK(r > 0);
    CHECK(fraclab_graph_resistance(g, 0, 1000, &r) == FRACLAB_CONFIG_ERROR);
    CHECK(std::string(fraclab_last_error()).size() > 0);
    double d = 0;
    CHECK(fraclab_graph_dimension(g, &d) == FRACLAB_OK);
    CHECK(d == doctest::Approx(std::log(3.0) / std::log(5.0 / 3.0)).epsilon(1e-10));
    fraclab_graph_free(g);
}

TEST_CASE("C API: errors leave outputs null") {
    fraclab_graph* g = reinterpret_cast<fraclab_graph*>(0x1);
    CHECK(fraclab_graph_build("carpet", 2, &g) == FRACLAB_CONFIG_ERROR);
    CHECK(g == nullptr);
    CHECK(std::string(fraclab_last_error()).find("carpet") != std::string::npos);
    CHECK(fraclab_graph_build(nullptr, 2, &g) == FRACLAB_CONFIG_ERROR);
    fraclab_report* rep = nullptr;
    CHECK(fraclab_run("eig", "{\"kind\":\"gasket\",\"bogus\":1}", &rep) == FRACLAB_CONFIG_ERROR);
    CHECK(rep == nullptr);
    CHECK(fraclab_run("nosuch", "{}", &rep) == FRACLAB_CONFIG_ERROR);
    CHECK(fraclab_run("eig", "{not json", &rep) == FRACLAB_CONFIG_ERROR);
}

TEST_CASE("C API: plain level-1 spectrum and symbol application") {
    fraclab_graph* g = nullptr;
    REQUIRE(fraclab_graph_build("gasket", 1, &g) == FRACLAB_OK);
    fraclab_basis* b = nullptr;
    REQUIRE(fraclab_basis_solve(g, "dirichlet", 1, 0, nullptr, &b) == FRACLAB_OK);
    REQUIRE(fraclab_basis_size(b) == 3);
    double ev[3];
    CHECK(fraclab_basis_eigenvalues(b, ev, 2) == FRACLAB_CONFIG_ERROR);
    REQUIRE(fraclab_basis_eigenvalues(b, ev, 3) == FRACLAB_OK);
    CHECK(ev[0] == doctest::Approx(2));
    CHECK(ev[2] == doctest::Approx(5));
    // lambda applied to the constant interior vector: (4 - 2) * 1 = 2
    double u[3] = {1, 1, 1}, out[3];
    CHECK(fraclab_apply_symbol(b, "lambda", u, nullptr, out, nullptr) == FRACLAB_OK);
    for (double v : out) CHECK(v == doctest::Approx(2.0));
    double oi[3];
    CHECK(fraclab_apply_symbol(b, "imaginary-power:1", u, nullptr, out, nullptr) == FRACLAB_CONFIG_ERROR);
    CHECK(fraclab_apply_symbol(b, "imaginary-power:1", u, nullptr, out, oi) == FRACLAB_OK);
    fraclab_basis_free(b);
    fraclab_graph_free(g);
}

TEST_CASE("C API: run returns a report") {
    fraclab_report* rep = nullptr;
    REQUIRE(fraclab_run("eig", R"({"kind":"gasket","level":1,"bc":"dirichlet","plain":true})", &rep) == FRACLAB_OK);
    CHECK(fraclab_report_status(rep) == 0);
    json j = json::parse(fraclab_report_json(rep));
    CHECK(j["command"] == "eig");
    CHECK(j["status"] == "ok");
    CHECK(j["config_hash"].is_string());
    CHECK(std::string(fraclab_report_text(rep)).find("{2, 5, 5}") != std::string::npos);
    fraclab_report_free(rep);
}

TEST_CASE("CLI: help and usage errors") {
    CHECK(cli("--help").code == 0);
    CHECK(cli("eig --help").code == 0);
    CHECK(cli("").code == 2);
    CHECK(cli("frobnicate").code == 2);
    CHECK(cli("eig --level notanumber").code == 2);
    CHECK(cli("eig --kind carpet --level 2").code == 2);
    CHECK(cli("build --kind gasket --level 40").code == 2);
    CHECK(cli("--format yaml eig").code == 2);
}

TEST_CASE("CLI: eig prints the spectrum") {
    Run r = cli("eig --kind gasket --level 1 --bc dirichlet --plain");
    CHECK(r.code == 0);
    CHECK(r.out.find("{2, 5, 5}") != std::string::npos);
    Run j = cli("--format json eig --kind gasket --level 1 --bc dirichlet --plain");
    REQUIRE(j.code == 0);
    json doc = json::parse(j.out);
    CHECK(doc["config"]["level"] == 1);
}

TEST_CASE("CLI: config file, flag overrides and report files") {
    auto dir = std::filesystem::temp_directory_path() / "fraclab_cli_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    {
        std::ofstream f(dir / "cfg.json");
        f << R"({"kind":"gasket","level":3,"bc":"neumann"})";
    }
    Run r = cli("--config " + (dir / "cfg.json").string() + " --out " + (dir / "o").string() +
                " eig --level 2 --count 4");
    REQUIRE(r.code == 0);
    json doc = json::parse(slurp(dir / "o" / "eig.json"));
    CHECK(doc["config"]["level"] == 2);
    CHECK(doc["config"]["bc"] == "neumann");
    CHECK(std::filesystem::exists(dir / "o" / "eig.csv"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("CLI: reports are byte-identical across runs and thread counts") {
    Run a = cli("--format json --threads 1 heat-fit --kind gasket --level 3 --bc dirichlet --seed 5");
    Run b = cli("--format json --threads 3 heat-fit --kind gasket --level 3 --bc dirichlet --seed 5");
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    Run c = cli("--format json --threads 1 heat-fit --kind gasket --level 3 --bc dirichlet --seed 6");
    CHECK(json::parse(a.out)["config_hash"] != json::parse(c.out)["config_hash"]);
}

TEST_CASE("CLI: product kernel streams to a file") {
    auto dir = std::filesystem::temp_directory_path() / "fraclab_cli_kernel";
    std::filesystem::remove_all(dir);
    Run r = cli("--out " + dir.string() + " product kernel --levels 2 --symbol riesz:1");
    REQUIRE(r.code == 0);
    auto bin = dir / "product_kernel.bin";
    REQUIRE(std::filesystem::exists(bin));
    json doc = json::parse(slurp(dir / "product.json"));
    CHECK(doc["result"]["kernel"]["bytes"] == std::filesystem::file_size(bin));
    CHECK(!doc["config"].contains("kernel_file"));
    // every gasket vertex is an active Neumann row
    std::ifstream f(bin, std::ios::binary);
    std::string header;
    std::getline(f, header);
    CHECK(json::parse(header)["rows1"] == 15);
    std::filesystem::remove_all(dir);
}

TEST_CASE("CLI: csv format") {
    Run r = cli("--format csv gaps --kind gasket --level 3 --bc neumann --min-width 0.1");
    CHECK(r.code == 0);
    CHECK(r.out.find(',') != std::string::npos);
    CHECK(r.out.front() != '{');
}

TEST_CASE("CLI: symbol flags reach the command") {
    Run a = cli("--format json symbol-verify --level 3 --symbol bessel:1,ratio --order -1.2");
    REQUIRE(a.code == 0);
    json j = json::parse(a.out);
    CHECK(j["config"]["symbols"] == json::array({"bessel:1", "ratio"}));
    CHECK(j["result"]["symbols"].size() == 2);
    Run b = cli("--format json product --levels 2 --symbol riesz:2");
    REQUIRE(b.code == 0);
    CHECK(json::parse(b.out)["config"]["symbol"] == "riesz:2");
    CHECK(cli("symbol-verify --level 3 --symbol nosuch:1").code == 2);
}
