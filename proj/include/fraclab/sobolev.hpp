#pragma once

#include "fraclab/psido.hpp"

namespace fraclab {

// All orders are scaled by the resistance dimension d: (1+lambda)^(s/(d+1)).
struct SobolevNorm {
    double s = 0;
    double p = 2;
    double d = 0;
};

// Mass-weighted l^p norm on active rows; p = infinity gives the max norm.
double lp_norm(const EigenBasis& b, const CVec& u, double p);

double hs_norm(const CVec& u, double s, const EigenBasis& b, double d);
// (I - Delta)^(s/(d+1)) u, spectrally
CVec bessel_power(const CVec& u, double s, const EigenBasis& b, double d);

struct OpBound {
    double C = 0;
    int argmax = -1;
    double argmax_lambda = 0;
};

// Smallest C with ||p(-Delta) u||_{H^{s-m}} <= C ||u||_{H^s}; the operator is diagonal so s drops out.
OpBound op_bound_hs(const Symbol& p, double m, double s, const EigenBasis& b, double d);

double lp_s_norm(const CVec& u, double s, double p, const EigenBasis& b, double d);

struct EmbeddingReport {
    double s = 0, p = 0, q = 0, d = 0;
    double max_ratio = 0;
    std::string worst;  // which input family attained it
    int trials = 0;
};

// Max of ||u||_q / ||u||_{L^p_s} over random smooth and rough inputs; requires 1/q = 1/p - s/d.
EmbeddingReport embedding_check(double s, double p, double q, const EigenBasis& b, double d, int trials,
                                std::uint64_t seed);

}  // namespace fraclab
