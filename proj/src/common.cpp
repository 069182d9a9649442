#include "fraclab/common.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <thread>

namespace fraclab {

void config_error(const std::string& msg) { throw Error(ErrorKind::Config, msg); }
void numeric_error(const std::string& msg) { throw Error(ErrorKind::Numeric, msg); }
void check_error(const std::string& msg) { throw Error(ErrorKind::Check, msg); }

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
}

Vec Rng::normal_vec(int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = normal();
    return v;
}

std::uint64_t fnv1a(const std::string& s, std::uint64_t h) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {
int g_threads = 1;
}

void set_threads(int n) { g_threads = std::max(1, n); }
int threads() { return g_threads; }

void parallel_for(int n, const std::function<void(int)>& body) {
    int t = std::min(g_threads, n);
    if (t <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    for (int w = 0; w < t; ++w) {
        pool.emplace_back([&, w] {
            for (int i = w; i < n; i += t) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    LineFit f;
    const std::size_t n = x.size();
    if (n < 2) return f;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= double(n);
    my /= double(n);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    f.slope = sxx > 0 ? sxy / sxx : 0.0;
    f.intercept = my - f.slope * mx;
    double r = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double e = y[i] - f.intercept - f.slope * x[i];
        r += e * e;
    }
    f.residual = std::sqrt(r / double(n));
    return f;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::vector<std::pair<int, int>> clusters(const Vec& sorted, double tol) {
    std::vector<std::pair<int, int>> out;
    const int n = int(sorted.size());
    int i = 0;
    while (i < n) {
        int j = i + 1;
        while (j < n && std::abs(sorted[j] - sorted[i]) <= tol) ++j;
        out.emplace_back(i, j);
        i = j;
    }
    return out;
}

}  // namespace fraclab
