#pragma once

#include "fraclab/psido.hpp"

#include <functional>
#include <string>
#include <vector>

namespace fraclab {

// p(x, lambda) with x an active row of a fixed basis.
struct VarSymbol {
    std::string name;
    double order_exponent = 0;  // m/(d+1)
    bool real = true;
    bool x_independent = false;
    std::function<cplx(int row, double lambda)> eval;

    cplx operator()(int row, double lambda) const { return eval(row, lambda); }
};

VarSymbol make_varsymbol(const std::string& name, double order_exponent, std::function<cplx(int, double)> f,
                         bool real = true);
VarSymbol from_symbol(const Symbol& p);

// Harmonic function on the graph with boundary values e_i (gasket kinds with a boundary).
Vec harmonic_function(const FractalGraph& g, int i);

// Named vertex functions over the active rows of b: h0 h1 h2 (harmonic), x y (ambient coordinates),
// phiN (eigenfunction N of b).
Vec x_feature(const EigenBasis& b, const std::string& name);

// Expression over lambda (l, lambda) and x-features, e.g. "(1+h0)*l/(1+l)".
VarSymbol parse_varsymbol(const std::string& text, const EigenBasis& b, double order_exponent = 0);

// (1 + h0(x)) lambda / (1 + lambda)
VarSymbol harmonic_ratio_symbol(const EigenBasis& b);

// P(row, n) = p(row, lambda_n)
CMat varsymbol_values(const VarSymbol& p, const EigenBasis& b);

struct VarExpansion {
    CMat m;  // m(k, n) = <p(., lambda_n), phi_k>
    double residual = 0;
};

// Requires a complete basis (Neumann or none with the zero mode kept, or Dirichlet).
VarExpansion expand_symbol(const VarSymbol& p, const EigenBasis& b, double tol = 1e-8);

CVec apply_varcoef(const VarSymbol& p, const EigenBasis& b, const CVec& u);

// sum_k phi_k(x) lambda_k^-n (mt_{k,n}(-Delta) u)(x) with mt_{k,n}(lambda) = <(-Delta_x)^n p(., lambda), phi_k>
struct ExpansionRoute {
    int n = 0;
    CVec value;
};
ExpansionRoute apply_varcoef_expansion(const VarSymbol& p, const EigenBasis& b, const CVec& u, int n);
// smallest integer n with alpha - n < -1.5
int expansion_index(double alpha);

KernelMatrix kernel_varcoef(const VarSymbol& p, const EigenBasis& b);

struct SupnormFit {
    double c = 0, alpha = 0;
    double slope = 0, intercept = 0;  // least squares line before the envelope shift
    int points = 0;
    bool all_below = true;
};

// Upper envelope log ||phi_k||_inf <= log c + alpha log lambda_k over the positive eigenvalues.
SupnormFit supnorm_exponent_fit(const EigenBasis& b);

struct LqReport {
    double q = 2;
    double max_ratio = 0;
    double exact_l2 = std::numeric_limits<double>::quiet_NaN();  // operator norm on L2(mu), q = 2 only
    double bound_proxy = 0;  // sum_k ||phi_k||_inf sup_n |m_k(lambda_n)|
    int trials = 0;
};

LqReport lq_bound_check(const VarSymbol& p, const EigenBasis& b, double q, int trials, std::uint64_t seed);

// ||T_p q(-Delta) u - q(-Delta) T_p u|| / ||u|| for a random u
double commutator_norm(const VarSymbol& p, const Symbol& q, const EigenBasis& b, std::uint64_t seed);

// max |K(x,y) - K(x',y)| R(x,y)^d over edges (x, x') with y outside the exclusion radius of both
struct ContinuityReport {
    double oscillation = 0;
    double exclusion = 0;
    long pairs = 0;
};
ContinuityReport kernel_continuity(const KernelMatrix& K, const EigenBasis& b, const Mat& R, double d,
                                   double exclusion = -1);

// sup (1+lambda)^(-m/(d+1)) |(lambda d/dlambda)^k Delta_x^j p| over active rows and the grid
struct VarClassReport {
    std::vector<std::vector<double>> C;  // [j][k]
    bool finite = true;
};
VarClassReport verify_varsymbol(const VarSymbol& p, const EigenBasis& b, int j_max, int k_max,
                                const std::vector<double>& grid);

}  // namespace fraclab
