#include "fraclab/taylor.hpp"

#include <cmath>

namespace fraclab {

namespace {
double factorial(int n) {
    double f = 1;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}
}  // namespace

Taylor::Taylor(int nvars, int order, cplx c0) : nv_(nvars), k_(order), c_(std::size_t((order + 1) * (order + 1)), 0.0) {
    if (nvars < 1 || nvars > 2 || order < 0) config_error("Taylor: 1 or 2 variables, order >= 0");
    c_[0] = c0;
}

Taylor Taylor::variable(int nvars, int order, int which, cplx value) {
    Taylor t(nvars, order, value);
    if (order >= 1) {
        if (which == 0)
            t.at(1, 0) = 1.0;
        else
            t.at(0, 1) = 1.0;
    }
    return t;
}

cplx Taylor::derivative(int i, int j) const {
    if (!live(i, j)) return 0.0;
    return at(i, j) * factorial(i) * factorial(j);
}

bool Taylor::finite() const {
    for (const auto& c : c_)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
}

Taylor Taylor::operator-() const {
    Taylor r = *this;
    for (auto& c : r.c_) c = -c;
    return r;
}

Taylor& Taylor::operator+=(const Taylor& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

Taylor& Taylor::operator-=(const Taylor& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

Taylor& Taylor::operator*=(const Taylor& o) {
    Taylor r(nv_, k_);
    const int jm = nv_ == 2 ? k_ : 0;
    for (int i = 0; i <= k_; ++i)
        for (int j = 0; j <= jm && i + j <= k_; ++j) {
            cplx s = 0;
            for (int a = 0; a <= i; ++a)
                for (int b = 0; b <= j; ++b) s += at(a, b) * o.at(i - a, j - b);
            r.at(i, j) = s;
        }
    *this = r;
    return *this;
}

Taylor& Taylor::operator*=(cplx s) {
    for (auto& c : c_) c *= s;
    return *this;
}

Taylor& Taylor::operator+=(cplx s) {
    c_[0] += s;
    return *this;
}

Taylor Taylor::compose(const std::vector<cplx>& d) const {
    Taylor delta = *this;
    delta.at(0, 0) = 0.0;
    Taylor out(nv_, k_, d.empty() ? cplx(0) : d[0]);
    Taylor pw(nv_, k_, 1.0);
    double fact = 1;
    for (int n = 1; n <= k_ && n < int(d.size()); ++n) {
        pw *= delta;
        fact *= n;
        Taylor term = pw;
        term *= d[std::size_t(n)] / fact;
        out += term;
    }
    return out;
}

Taylor operator+(Taylor a, const Taylor& b) { return a += b; }
Taylor operator-(Taylor a, const Taylor& b) { return a -= b; }
Taylor operator*(Taylor a, const Taylor& b) { return a *= b; }
Taylor operator/(const Taylor& a, const Taylor& b) { return a * pow(b, cplx(-1.0)); }
Taylor operator+(Taylor a, cplx s) { return a += s; }
Taylor operator+(cplx s, Taylor a) { return a += s; }
Taylor operator-(Taylor a, cplx s) { return a += -s; }
Taylor operator-(cplx s, const Taylor& a) { return (-a) + s; }
Taylor operator*(Taylor a, cplx s) { return a *= s; }
Taylor operator*(cplx s, Taylor a) { return a *= s; }
Taylor operator/(const Taylor& a, cplx s) { return a * (1.0 / s); }
Taylor operator/(cplx s, const Taylor& a) { return pow(a, cplx(-1.0)) * s; }

cplx ipow(cplx x, int e) {
    if (e < 0) return 1.0 / ipow(x, -e);
    cplx r = 1.0;
    while (e) {
        if (e & 1) r *= x;
        x *= x;
        e >>= 1;
    }
    return r;
}

Taylor exp(const Taylor& x) {
    cplx e = std::exp(x.value());
    return x.compose(std::vector<cplx>(std::size_t(x.order() + 1), e));
}

Taylor log(const Taylor& x) {
    cplx x0 = x.value();
    std::vector<cplx> d(std::size_t(x.order() + 1));
    d[0] = std::log(x0);
    double f = 1;
    for (int n = 1; n <= x.order(); ++n) {
        if (n > 1) f *= (n - 1);
        d[std::size_t(n)] = ((n % 2) ? 1.0 : -1.0) * f / ipow(x0, n);
    }
    return x.compose(d);
}

Taylor sin(const Taylor& x) {
    cplx s = std::sin(x.value()), c = std::cos(x.value());
    cplx cyc[4] = {s, c, -s, -c};
    std::vector<cplx> d(std::size_t(x.order() + 1));
    for (int n = 0; n <= x.order(); ++n) d[std::size_t(n)] = cyc[n % 4];
    return x.compose(d);
}

Taylor cos(const Taylor& x) {
    cplx s = std::sin(x.value()), c = std::cos(x.value());
    cplx cyc[4] = {c, -s, -c, s};
    std::vector<cplx> d(std::size_t(x.order() + 1));
    for (int n = 0; n <= x.order(); ++n) d[std::size_t(n)] = cyc[n % 4];
    return x.compose(d);
}

Taylor sqrt(const Taylor& x) { return pow(x, cplx(0.5)); }

Taylor pow(const Taylor& x, cplx s) {
    cplx x0 = x.value();
    std::vector<cplx> d(std::size_t(x.order() + 1));
    cplx fall = 1.0;
    bool integer = s.imag() == 0 && std::floor(s.real()) == s.real() && std::abs(s.real()) < 64;
    for (int n = 0; n <= x.order(); ++n) {
        if (integer) {
            int e = int(s.real()) - n;
            d[std::size_t(n)] = fall * ipow(x0, e);
        } else {
            d[std::size_t(n)] = fall * std::pow(x0, s - double(n));
        }
        fall *= (s - double(n));
    }
    return x.compose(d);
}

Taylor pow(const Taylor& x, const Taylor& y) {
    bool constant = true;
    for (int i = 0; i <= y.order(); ++i)
        for (int j = 0; j <= (y.nvars() == 2 ? y.order() : 0) && i + j <= y.order(); ++j)
            if ((i || j) && y.at(i, j) != cplx(0)) constant = false;
    if (constant) return pow(x, y.value());
    return exp(y * log(x));
}

}  // namespace fraclab
