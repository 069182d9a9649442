#pragma once

#include "fraclab/common.hpp"

#include <array>
#include <memory>
#include <string>
#include <vector>

namespace fraclab {

enum class Kind { Gasket, Circle, DoubleCover };

Kind parse_kind(const std::string& s);
std::string to_string(Kind k);

struct Edge {
    int i, j;
    double conductance;
};

struct FractalGraph {
    Kind kind = Kind::Gasket;
    int level = 0;  // circle: vertex count
    std::vector<std::string> words;
    std::vector<Edge> edges;
    std::vector<int> boundary;
    std::vector<double> mass;
    // finest-level cells (gasket family only): corner vertices and address word
    std::vector<std::array<int, 3>> cells;
    std::vector<std::string> cell_words;
    // ambient planar coordinates, used as x-features
    std::vector<std::array<double, 2>> coords;

    int size() const { return int(words.size()); }
    bool is_boundary(int v) const;
    // energy matrix; plain = unit conductances
    Mat energy(bool plain = false) const;
    std::string to_json() const;
    std::uint64_t hash() const;
    // vertices of the union of finest cells whose word starts with prefix
    std::vector<int> cell_vertices(const std::string& prefix) const;
    // the three corners of the cell with the given word prefix
    std::array<int, 3> cell_corners(const std::string& prefix) const;
};

struct BuildOptions {
    int max_vertices = 10000;
};

FractalGraph build(Kind kind, int level, const BuildOptions& opt = {});

// Lumped measure: each finest cell carries an equal share, split among its corners.
std::vector<double> mass_weights(const FractalGraph& g);

// Effective resistance between two vertices by a Dirichlet solve u(x)=0, u(y)=1.
double resistance(const FractalGraph& g, int x, int y);
// All-pairs effective resistance through the pseudo-inverse of the energy matrix.
Mat resistance_matrix(const FractalGraph& g);

// Max corner-to-corner resistance over finest cells (circle: neighbour distance).
double cell_diameter(const FractalGraph& g, const Mat& R);

struct DoublingSample {
    int x;
    double r;
    double ratio;
    bool below_resolution;
};

struct DoublingReport {
    double max_ratio = 0;
    std::vector<DoublingSample> samples;
};

DoublingReport doubling_report(const FractalGraph& g, const Mat& R, int sample_count,
                               const std::vector<double>& radii, std::uint64_t seed);

struct DimensionReport {
    double d = 0;          // from plain resistance refinement scaling
    double d_reference = 0;
    double d_ball = 0;     // ball-volume fit, cross-check only
};

DimensionReport measure_dimension(const FractalGraph& g, const Mat& R);
// Only the resistance-scaling estimate, without the all-pairs matrix.
double measured_d(const FractalGraph& g);

}  // namespace fraclab
