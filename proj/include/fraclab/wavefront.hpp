#pragma once

#include "fraclab/products.hpp"

#include <set>
#include <string>
#include <vector>

namespace fraclab {

// Coefficient magnitudes on the lattice of distinct eigenvalue pairs. Each entry is the
// Frobenius norm of the coefficient block of one eigenspace pair, so it does not depend
// on the choice of basis inside degenerate eigenspaces.
struct CoeffField {
    Vec lam1, lam2;  // distinct eigenvalues of each factor
    Mat a;           // lam1.size() x lam2.size()
};

CoeffField coeff_field(const ProductBasis& pb, const CMat& C);

// Cone by ratio interval lo < lambda1 / lambda2 < hi (hi may be infinite).
struct ConeClass {
    std::string name;
    double lo = 0, hi = INFINITY;
};

ConeClass cone_class(const ConeSpec& c, const std::string& name = "cone");
// y-axis, middle and x-axis classes split at ratio 1/3.7 and 3.7
std::vector<ConeClass> default_cone_classes();

enum class Verdict { Smooth, Truncated, Vacuous, Zero, Flag };
std::string to_string(Verdict v);

struct ConeDecay {
    Verdict verdict = Verdict::Vacuous;
    double slope = 0, residual = 0;
    double slope_all = 0;  // plain least squares over every nonzero lattice point
    int points = 0;        // lattice points in the cone
    int bands = 0;   // dyadic bands carrying a coefficient above the floor
    bool sparse = false;  // fewer than 20 lattice points
};

// Band maxima over dyadic bands of log2(1 + lambda1 + lambda2) inside the cone, fitted against
// log(1 + lambda) at each band's argmax. Smooth when the slope beats -n_max/(d+1) by 10%; when
// the two highest bands hold nothing above the floor the field is reported as truncated smooth.
ConeDecay cone_decay_exponent(const CoeffField& c, const ConeClass& cone, double n_max, double d,
                              double floor = 1e-13);

// A product region: rows of each factor basis (union of cells).
struct Region {
    std::string name;
    std::vector<int> rows1, rows2;
};

struct WFCell {
    int region = 0, cone = 0;
    ConeDecay decay;
};

struct WFGrid {
    std::vector<Region> regions;
    std::vector<ConeClass> cones;
    std::vector<WFCell> cells;  // region-major
    std::set<std::pair<int, int>> flagged() const;
    std::string csv() const;
};

// Localizes U to each region by the cell indicator, re-expands and classifies every cone.
WFGrid wf_estimate(const CMat& U, const ProductBasis& pb, const std::vector<Region>& regions,
                   const std::vector<ConeClass>& cones, double n_max, double d);

// Regions as products of the given cell prefixes of each factor graph.
std::vector<Region> cell_regions(const ProductBasis& pb, const std::vector<std::string>& prefixes);

// Analytic classification for u1 (x) u2 with singular supports given as cell indices:
// both singular -> every cone, only u2 singular -> y-axis class, only u1 singular -> x-axis class.
std::set<std::pair<int, int>> tensor_wf_reference(const std::set<int>& sing1, const std::set<int>& sing2, int ncells1,
                                                  int ncells2, const std::vector<ConeClass>& cones);

// Eigenfunctions of the whole graph supported in the vertex set S (zero outside), grouped by eigenvalue.
struct LocalizedCluster {
    double lambda = 0;
    Mat F;  // graph size x multiplicity, columns measure-orthonormal up to the cut
};
std::vector<LocalizedCluster> localized_eigenfunctions(const FractalGraph& g, const std::vector<int>& interior);

// One localized eigenfunction per eigenvalue found in nested cells prefix, prefix+w1, ... (deeper wins),
// each chosen to peak at the innermost cell's first interior vertex and normalized in L2(mu).
struct LocalizedSeries {
    int point = -1;  // graph vertex the series concentrates at
    std::vector<std::pair<double, Vec>> terms;  // ascending eigenvalue
};
LocalizedSeries localized_series(const FractalGraph& g, const std::string& prefix, const std::string& nested);

struct PanelCase {
    std::set<int> sing1, sing2;
    bool match = false;
    int flagged = 0, expected = 0;
    bool monotone = true;        // every S^0 test symbol
    bool elliptic_equal = true;
    bool scaling_equal = true;
};

struct WavefrontPanel {
    int level = 0;
    double d = 0, n_max = 1;
    std::vector<double> series_eigenvalues;
    std::vector<PanelCase> cases;
    std::set<std::pair<int, int>> localized_flags, localized_expected;
    int smooth_flags = 0;
    std::vector<std::string> monotone_symbols;
    bool passes() const;
};

// Tensor examples, localized-coefficient example and operator checks on the double cover.
WavefrontPanel wavefront_panel(int level = 5, double n_max = 1, const std::string& cache_dir = "");

}  // namespace fraclab
