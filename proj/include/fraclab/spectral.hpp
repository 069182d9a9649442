#pragma once

#include "fraclab/graph.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace fraclab {

enum class BC { Dirichlet, Neumann, None };

BC parse_bc(const std::string& s);
std::string to_string(BC bc);

struct EigenBasis {
    std::shared_ptr<const FractalGraph> graph;
    BC bc = BC::Dirichlet;
    bool plain = false;
    bool zero_mode_excluded = false;
    std::vector<int> active;  // graph vertex index of each row
    Vec mass;                 // measure weight of each active vertex
    Vec eigenvalues;          // ascending, with multiplicity
    Mat vectors;              // measure-orthonormal columns

    int rows() const { return int(active.size()); }
    int size() const { return int(eigenvalues.size()); }
    std::uint64_t hash() const;
    // <u, phi_n>_mu for every n
    Vec coefficients(const Vec& u) const;
    CVec coefficients(const CVec& u) const;
    Vec synthesize(const Vec& c) const;
    CVec synthesize(const CVec& c) const;
    double inner(const Vec& u, const Vec& v) const;
    double norm(const Vec& u) const { return std::sqrt(inner(u, u)); }
    // restriction of a graph function to the active rows, and the inverse embedding
    Vec restrict(const Vec& full) const;
    // generalized Laplacian action M^{-1} E on active rows
    Mat laplacian() const;
    Mat energy() const;
};

struct EigenOptions {
    bool plain = false;
    bool keep_zero_mode = false;
    std::string cache_dir;  // empty: no cache
};

EigenBasis eigensolve(const FractalGraph& g, BC bc, const EigenOptions& opt = {});
EigenBasis eigensolve(std::shared_ptr<const FractalGraph> g, BC bc, const EigenOptions& opt = {});

// Relative tolerance used to decide that two eigenvalues coincide.
double cluster_tolerance(const Vec& eigenvalues);

struct DecimationResult {
    std::vector<double> values;  // ascending with multiplicity
    bool oracle_checked = false;
    double max_oracle_diff = 0;
};

// Plain-Laplacian Dirichlet spectrum of the gasket from the decimation recursion.
DecimationResult decimation_spectrum(int level);

struct BranchReport {
    int branch = 0;
    std::vector<double> scaled;      // c * 5^m * lambda_m
    std::vector<double> increments;  // successive differences
    bool cauchy = true;
};

struct RenormReport {
    std::vector<int> levels;
    double c = 0;
    std::vector<double> per_branch_c;
    std::vector<BranchReport> branches;
};

RenormReport renormalized_limits(const std::vector<int>& levels, BC bc = BC::Dirichlet, int n_branches = 5);

struct Gap {
    double alpha, beta;
    double relative_width;
    std::pair<double, double> witness_low;   // eigenvalue pair realising alpha
    std::pair<double, double> witness_high;  // eigenvalue pair realising beta
};

std::vector<Gap> spectral_gaps(const std::vector<double>& eigenvalues, double min_relative_width);

struct WeylFit {
    double exponent = 0;
    double residual = 0;
    double lambda_lo = 0, lambda_hi = 0;
};

// Slope of log N(lambda) against log lambda on a log-spaced grid over [lo, hi].
WeylFit weyl_fit(const Vec& eigenvalues, double lo, double hi, int points = 40);

}  // namespace fraclab
