// Acceptance battery: criteria 1-10 in process, determinism through the CLI.

#include "fraclab/suite.hpp"

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using fraclab::CheckResult;

namespace {

// runtime ceilings in seconds
const std::map<int, double> kBudget = {{1, 1.0}, {2, 30.0}, {3, 60.0}};

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

int shell(const std::string& cmd) {
    int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

void line(int id, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] %2d %-24s %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
    std::fflush(stdout);
}

}  // namespace

int main(int argc, char** argv) {
    fraclab::SuiteOptions opt;
    opt.level = 3;
    opt.seed = 1;
    if (argc > 1) opt.level = std::atoi(argv[1]);
    const auto names = fraclab::criterion_names();
    int failed = 0;

    for (int id = 1; id <= 10; ++id) {
        CheckResult r = fraclab::run_criterion(id, opt);
        bool pass = r.pass;
        std::string detail = r.detail;
        auto b = kBudget.find(id);
        if (b != kBudget.end()) {
            char t[96];
            std::snprintf(t, sizeof t, " [%.2fs, limit %.0fs]", r.seconds, b->second);
            detail += t;
            if (r.seconds >= b->second) pass = false;
        }
        line(id, r.name, pass, detail);
        for (const auto& [k, v] : r.metrics) std::printf("       %-28s %.6g\n", k.c_str(), v);
        for (const auto& s : r.info) std::printf("       info: %s\n", s.c_str());
        if (!pass) ++failed;
    }

    // determinism: two independent CLI processes, same seed, compare every report byte
    fs::path root = fs::temp_directory_path() / "fraclab_acceptance";
    fs::remove_all(root);
    std::string base = std::string(FRACLAB_CLI_PATH) + " --seed 1 --out ";
    std::string tail = " suite --level " + std::to_string(opt.level) + " > /dev/null";
    int ca = shell(base + (root / "a").string() + tail);
    int cb = shell(base + (root / "b").string() + tail);
    bool same = true;
    int files = 0;
    for (const char* f : {"suite.json", "suite.csv"}) {
        bool ea = fs::exists(root / "a" / f), eb = fs::exists(root / "b" / f);
        if (!ea && !eb) continue;
        ++files;
        same = same && ea && eb && slurp(root / "a" / f) == slurp(root / "b" / f);
    }
    bool pass11 = same && files > 0 && ca == cb && ca >= 0;
    line(11, names[10], pass11,
         std::to_string(files) + " report files compared, exit codes " + std::to_string(ca) + "/" +
             std::to_string(cb) + (same ? ", identical" : ", differ"));
    if (!pass11) ++failed;
    fs::remove_all(root);

    std::printf("%d of 11 criteria passed\n", 11 - failed);
    return failed == 0 ? 0 : 1;
}
