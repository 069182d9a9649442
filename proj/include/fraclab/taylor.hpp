#pragma once

#include "fraclab/common.hpp"

#include <vector>

namespace fraclab {

// Truncated Taylor polynomial in one or two variables (total degree <= order),
// used for exact derivatives of symbols.
class Taylor {
public:
    Taylor() = default;
    Taylor(int nvars, int order, cplx c0 = 0.0);
    static Taylor variable(int nvars, int order, int which, cplx value);

    int nvars() const { return nv_; }
    int order() const { return k_; }
    cplx& at(int i, int j = 0) { return c_[std::size_t(i * (k_ + 1) + j)]; }
    cplx at(int i, int j = 0) const { return c_[std::size_t(i * (k_ + 1) + j)]; }
    cplx value() const { return c_[0]; }
    // d^i/dx^i d^j/dy^j at the expansion point
    cplx derivative(int i, int j = 0) const;
    bool finite() const;

    Taylor operator-() const;
    Taylor& operator+=(const Taylor& o);
    Taylor& operator-=(const Taylor& o);
    Taylor& operator*=(const Taylor& o);
    Taylor& operator*=(cplx s);
    Taylor& operator+=(cplx s);

    // f(x) from the derivatives f^(n)(x0), n = 0..order
    Taylor compose(const std::vector<cplx>& derivs) const;

private:
    int nv_ = 1, k_ = 0;
    std::vector<cplx> c_;
    bool live(int i, int j) const { return i + j <= k_ && (nv_ == 2 || j == 0); }
};

Taylor operator+(Taylor a, const Taylor& b);
Taylor operator-(Taylor a, const Taylor& b);
Taylor operator*(Taylor a, const Taylor& b);
Taylor operator/(const Taylor& a, const Taylor& b);
Taylor operator+(Taylor a, cplx s);
Taylor operator+(cplx s, Taylor a);
Taylor operator-(Taylor a, cplx s);
Taylor operator-(cplx s, const Taylor& a);
Taylor operator*(Taylor a, cplx s);
Taylor operator*(cplx s, Taylor a);
Taylor operator/(const Taylor& a, cplx s);
Taylor operator/(cplx s, const Taylor& a);

// integer power by repeated squaring (exact sign for negative bases)
cplx ipow(cplx x, int e);

Taylor exp(const Taylor& x);
Taylor log(const Taylor& x);
Taylor sin(const Taylor& x);
Taylor cos(const Taylor& x);
Taylor sqrt(const Taylor& x);
Taylor pow(const Taylor& x, cplx s);
Taylor pow(const Taylor& x, const Taylor& y);

}  // namespace fraclab
