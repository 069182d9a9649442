#pragma once

#include "fraclab/spectral.hpp"

#include <vector>

namespace fraclab {

struct HeatKernelSlice {
    cplx z;
    CMat values;  // over active rows
};

HeatKernelSlice heat_kernel(const EigenBasis& b, cplx z);
Mat heat_kernel_real(const EigenBasis& b, double t);
// h_t(x,x) on the listed rows for each t
Mat heat_diagonal(const EigenBasis& b, const std::vector<double>& ts, const std::vector<int>& rows);

// Log-spaced grid over [lo_factor/lambda_max, hi_factor/lambda_min].
std::vector<double> scaling_window(const EigenBasis& b, int points = 40, double lo_factor = 10.0,
                                   double hi_factor = 0.1);

// Active rows whose resistance to the boundary is at least fraction * max (all rows if no boundary).
std::vector<int> bulk_rows(const EigenBasis& b, const Mat& R, double fraction);

struct OnDiagonalFit {
    double beta = 0;
    double spread = 0;  // std of per-vertex slopes
    double t_lo = 0, t_hi = 0;
    int samples = 0;
    bool narrow_window = false;
};

OnDiagonalFit fit_on_diagonal(const EigenBasis& b, const std::vector<double>& ts, const std::vector<int>& rows);

struct SubGaussianFit {
    double c1 = 0, c2 = 0, gamma = 0, d = 0, beta = 0;
    double residual_max = 0;   // largest positive residual of the least-squares fit
    double bound_slack = 0;    // min over samples of log(bound) - log(h), >= 0 after adjustment
    int used = 0;
    std::vector<std::pair<int, int>> excluded;  // non-positive kernel values
};

SubGaussianFit fit_subgaussian(const EigenBasis& b, const Mat& R, const std::vector<double>& ts,
                               const std::vector<std::pair<int, int>>& pairs, double d);

struct ComplexBoundSample {
    cplx z;
    double theta;
    double sup;        // max |h_z(x,y)| over the sample
    double c_re;       // sup * (Re z)^beta
    double c_polar;    // sup * (|z| cos theta)^beta / 2^beta
};

struct ComplexBoundReport {
    double beta = 0;
    double c_re = 0, c_polar = 0;  // smallest admissible constants
    std::vector<ComplexBoundSample> samples;
};

ComplexBoundReport complex_bound_check(const EigenBasis& b, const std::vector<cplx>& zs,
                                       const std::vector<int>& rows, double d);

}  // namespace fraclab
