#pragma once

#include "fraclab/taylor.hpp"

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace fraclab {

// Arithmetic expressions over named variables: numbers, + - * / ^, exp, log, sin, cos, sqrt.
class Expr {
public:
    struct Node;
    // aliases: every accepted spelling of each variable, in variable order
    Expr(const std::string& text, const std::vector<std::vector<std::string>>& aliases);
    cplx eval(const std::vector<cplx>& vars) const;
    Taylor eval(const std::vector<Taylor>& vars) const;
    // true if the expression mentions variable k
    bool uses(int k) const;
    bool real() const;
    const std::string& text() const { return text_; }

private:
    std::string text_;
    std::shared_ptr<const Node> root_;
};

// Constant expression such as "0.5" or "1+2i".
cplx parse_constant(const std::string& text);

using Jet1 = std::function<Taylor(const Taylor&)>;
using Jet2 = std::function<Taylor(const Taylor&, const Taylor&)>;

struct Symbol {
    std::string name;
    double order_exponent = 0;  // declared order m stored as m/(d+1)
    double rho = 1;
    bool real = true;
    bool needs_nonzero = false;  // undefined at lambda = 0
    std::function<cplx(double)> eval;
    Jet1 jet;  // closed-form derivatives, may be empty

    cplx operator()(double lambda) const { return eval(lambda); }
    double order(double d) const { return order_exponent * (d + 1.0); }
    // p^(j)(lambda) for j = 0..k
    std::vector<cplx> derivatives(double lambda, int k) const;
};

Symbol make_symbol(const std::string& name, double order_exponent, Jet1 jet, bool real = true);
Symbol operator*(const Symbol& a, const Symbol& b);

Symbol constant_symbol(cplx c);
Symbol lambda_symbol();
Symbol bessel(cplx s);
Symbol riesz(cplx s);
Symbol ratio_symbol();
Symbol heat_symbol(double t);
Symbol imaginary_power(double tau);

// Registry: bessel:s, riesz:s, ratio, heat:t, imaginary-power:tau, lambda, const:c,
// otherwise an expression in the spectral variable (λ, lambda or l).
Symbol parse_symbol(const std::string& spec);

// Richardson-extrapolated central differences, p^(j)(lambda) for j = 0..k.
std::vector<cplx> richardson_derivatives(const std::function<cplx(double)>& f, double lambda, int k);
// Relative base step used for the k-th derivative.
double richardson_step(int k);

struct Symbol2 {
    std::string name;
    double order_exponent = 0;
    bool real = true;
    bool needs_nonzero = false;  // undefined when lambda1 + lambda2 = 0
    std::function<cplx(double, double)> eval;
    Jet2 jet;

    cplx operator()(double l1, double l2) const { return eval(l1, l2); }
    double order(double d) const { return order_exponent * (d + 1.0); }
    // bivariate Taylor jet of total degree k (coefficients, not derivatives)
    Taylor expand(double l1, double l2, int k) const;
};

Symbol2 make_symbol2(const std::string& name, double order_exponent, Jet2 jet, bool real = true);
Symbol2 operator*(const Symbol2& a, const Symbol2& b);
Symbol2 tensor_symbol(const Symbol& f, const Symbol& g);

// Registry: riesz:1, riesz:2, sum, elliptic, mixed, diff:a, one, tensor:A|B, or an expression in l1, l2.
Symbol2 parse_symbol2(const std::string& spec);

}  // namespace fraclab
