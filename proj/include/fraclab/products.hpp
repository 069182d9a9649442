#pragma once

#include "fraclab/psido.hpp"

#include <memory>
#include <string>
#include <vector>

namespace fraclab {

struct ProductBasis {
    int N = 2;
    std::shared_ptr<const EigenBasis> b1, b2;
    struct Pair {
        int n1, n2;
        double l1, l2;
    };
    std::vector<Pair> pairs;  // sorted by l1 + l2, ties by (n1, n2)

    int rows1() const { return b1->rows(); }
    int rows2() const { return b2->rows(); }
    // functions on the product vertex set are rows1 x rows2 matrices
    CMat coefficients(const CMat& U) const;  // size(b1) x size(b2)
    CMat synthesize(const CMat& C) const;
    double inner(const CMat& U, const CMat& W) const;  // real part of <U, W>
    double norm(const CMat& U) const;
};

ProductBasis product_basis(std::shared_ptr<const EigenBasis> b1, std::shared_ptr<const EigenBasis> b2,
                           long cap = 250000);

struct MarcinkiewiczTerm {
    int a1 = 0, a2 = 0;
    double C = 0;
    double at1 = 0, at2 = 0;
    bool stable = true;
};

struct MarcinkiewiczReport {
    double m = 0, d = 0;
    int alpha_max = 0;
    std::vector<MarcinkiewiczTerm> terms;
    bool finite = true, stable = true, passes = true;
    bool closed_form = false;
};

// lambda^alpha |d^alpha p| (1 + lambda1 + lambda2)^(-m/(d+1)) for 0 <= alpha_i <= alpha_max.
MarcinkiewiczReport verify_marcinkiewicz(const Symbol2& p, double m, int alpha_max,
                                         const std::vector<std::pair<double, double>>& grid, double d);

// p(lambda1, lambda2) over the index grid, size(b1) x size(b2)
CMat symbol_values(const Symbol2& p, const ProductBasis& pb);
CMat apply2(const Symbol2& p, const ProductBasis& pb, const CMat& U);

// Full kernel over paired vertices, index x1 * rows2 + x2. Small products only.
KernelMatrix kernel2(const Symbol2& p, const ProductBasis& pb, int max_rows = 4096);

// Streams the kernel block by block: a JSON header line, then for every (x1, y1) a rows2 x rows2
// row-major block of float64 (interleaved re, im when complex).
void write_kernel2(const Symbol2& p, const ProductBasis& pb, const std::string& path);

// Discrete Laplacian counts applied in each factor (spectrally these multiply by lambda_i).
struct ProductVariant {
    std::string name;
    int f1 = 0, f2 = 0;
};

std::vector<ProductVariant> default_product_variants();

struct ProductDecay {
    std::string variant;
    double sup = 0;
    int x1 = -1, y1 = -1, x2 = -1, y2 = -1;  // graph vertex indices
    double r1 = 0, r2 = 0;
    double exclusion1 = 0, exclusion2 = 0;
    long admissible = 0;
};

// sup |K| R1^(d + f1(d+1)) R2^(d + f2(d+1)) over pairs admissible in both factors, computed blockwise.
std::vector<ProductDecay> product_decay(const Symbol2& p, const ProductBasis& pb, const Mat& R1, const Mat& R2,
                                        double d, const std::vector<ProductVariant>& variants,
                                        double exclusion1 = -1, double exclusion2 = -1);

struct ConeSpec {
    double a = 1, eps = 0.5;
    bool contains(double l1, double l2) const { return std::abs(l1 - a * l2) < eps * l2; }
};

struct GapCone {
    ConeSpec cone;
    double ratio_lo = 0, ratio_hi = 0;
    double relative_width = 0;
};

struct GapConeReport {
    std::vector<GapCone> cones;  // sorted by ratio
    long pairs = 0;
    bool few_pairs = false;  // fewer than 100 pairs
};

// Empty cones from gaps of the ratio set {lambda1 / lambda2}.
GapConeReport gap_cones(const std::vector<double>& spec1, const std::vector<double>& spec2, double min_width);
GapConeReport gap_cones(const ProductBasis& pb, double min_width);

struct EllipticReport {
    bool passes = false;
    double c = 0;  // inf |p| |lambda|^(-m/(d+1))
    double at1 = 0, at2 = 0;
    long points = 0;
};

// Radii log-spaced over [A, r_max], angles on a uniform grid refined around each radius' minimum.
EllipticReport elliptic_check(const Symbol2& p, double m, double A, double r_max, double d, int radii = 48,
                              int angles = 201);
EllipticReport elliptic_on_spectrum(const Symbol2& p, double m, double A, const ProductBasis& pb, double d);

// Smooth modification of p inside the cone: log-modulus and phase interpolated in the angle
// theta = atan(lambda1 / lambda2) between the cone edges, glued to p by the Littlewood-Paley bump.
Symbol2 elliptic_extension(const Symbol2& p, double m, const ConeSpec& cone, double A, double d,
                           double r_max);

struct QuasiInverse {
    double inf = 0;
    int n1 = -1, n2 = -1;
    double l1 = 0, l2 = 0;
    double op_norm = 0;  // L2 norm of the inverse, 1 / min |lambda1 - a lambda2|
};

QuasiInverse quasi_inverse_check(double a, const ProductBasis& pb);

}  // namespace fraclab
