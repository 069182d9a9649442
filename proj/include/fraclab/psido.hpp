#pragma once

#include "fraclab/spectral.hpp"
#include "fraclab/symbol.hpp"

#include <limits>
#include <string>
#include <vector>

namespace fraclab {

// Geometric grid with per_octave points per doubling over [lo, hi].
std::vector<double> dyadic_grid(double lo, double hi, int per_octave = 4);
// Dyadic grid covering the basis spectrum with one octave of margin on each side.
std::vector<double> spectrum_grid(const EigenBasis& b, int per_octave = 4);

// A finite grid cannot witness unboundedness directly: a sup is called tail-stable when its
// value over the top quarter of the grid is at most twice the value over the rest.
bool tail_stable(const std::vector<double>& per_point);

struct SymbolClassReport {
    double m = 0, rho = 1, d = 0;
    int k_max = 0;
    std::vector<double> C;       // per k
    std::vector<double> argmax;  // lambda attaining C_k
    bool finite = true, stable = true, passes = true;
    bool closed_form = false;
    std::vector<std::string> failures;  // non-finite grid points
};

SymbolClassReport verify_symbol_class(const Symbol& p, double m, double rho, int k_max,
                                      const std::vector<double>& grid, double d);

// Littlewood-Paley window
double lp_eta(double lambda);
double lp_delta(double lambda);

struct LPPiece {
    int n;
    Symbol piece;
};

struct LPDecomposition {
    int n_lo = 0, n_hi = 0;
    std::vector<LPPiece> pieces;
    double reconstruction_error = 0;  // on the covered range [2^n_lo, 2^n_hi]
};

LPDecomposition lp_decompose(const Symbol& p, int n_lo, int n_hi, const std::vector<double>& grid);

// p(lambda_n) for every eigenvalue, with offending eigenvalues reported on failure.
CVec symbol_values(const Symbol& p, const EigenBasis& b);
CVec apply(const Symbol& p, const EigenBasis& b, const CVec& u);
CVec apply(const Symbol& p, const EigenBasis& b, const Vec& u);

struct ComposeReport {
    double max_deviation = 0;  // relative, in L2(mu)
    int trials = 0;
};

ComposeReport compose_check(const Symbol& p1, const Symbol& p2, const EigenBasis& b, int trials, std::uint64_t seed);

struct KernelMatrix {
    std::string symbol;
    std::uint64_t basis_hash = 0;
    double exclusion_radius = 0;
    CMat values;  // over active rows

    bool is_real(double tol = 0) const;
    // integration against the measure: sum_y K(x,y) u(y) mu(y)
    CVec integrate(const EigenBasis& b, const CVec& u) const;
};

// Sum over eigen-index blocks of fixed size, combined by a fixed pairwise tree.
CMat spectral_sum(const Mat& V, const CVec& weights, const Mat& W);
KernelMatrix kernel(const Symbol& p, const EigenBasis& b);

// Twice the largest resistance diameter of a finest cell.
double default_exclusion(const EigenBasis& b, const Mat& R);

struct DecayReport {
    double alpha = 0;
    int l = 0, k = 0;
    double exclusion = 0;
    double sup = 0;
    int argmax_x = -1, argmax_y = -1;  // graph vertex indices
    double argmax_r = 0;
    long admissible = 0;
};

// sup |L^l K (L^T)^k|(x,y) R(x,y)^alpha over pairs with R >= exclusion; R indexed by graph vertices.
DecayReport decay_report(const KernelMatrix& K, const EigenBasis& b, const Mat& R, double alpha, int l = 0,
                         int k = 0, double exclusion = -1);

struct HormanderTerm {
    int a1 = 0, a2 = 0;
    double c = 0;
    double at1 = 0, at2 = 0;
    bool stable = true;
};

struct HormanderReport {
    double eps = 0, A = 0;
    int alpha_max = 0;
    std::vector<HormanderTerm> terms;
    bool finite = true, stable = true, passes = true;
    double gamma = std::numeric_limits<double>::quiet_NaN();
    bool hypothesis_ok = true;  // eps > 1/(gamma+1) when gamma is known
};

HormanderReport hormander_check(const Symbol& p, double eps, double A, int alpha_max,
                                const std::vector<double>& grid,
                                double gamma = std::numeric_limits<double>::quiet_NaN());

// Points of the closed quadrant: radii r = lambda1 + lambda2 from the grid, and for each the two axes
// plus rays with lambda1/lambda2 log-spaced over [1e-4, 1e4].
std::vector<std::pair<double, double>> quadrant_grid(const std::vector<double>& radii, int rays = 17);

HormanderReport hormander_check(const Symbol2& p, double eps, double A, int alpha_max,
                                const std::vector<std::pair<double, double>>& grid,
                                double gamma = std::numeric_limits<double>::quiet_NaN());

// Off-diagonal decay exponent d*gamma/(rho(gamma+1)-1) for S_rho kernels.
double rho_kernel_exponent(double d, double gamma, double rho);

}  // namespace fraclab
