#pragma once

// Dense reference computations written directly against Eigen, sharing nothing with the library.

#include "fraclab/graph.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace oracle {

inline Eigen::MatrixXd energy(const fraclab::FractalGraph& g, bool plain) {
    const int n = g.size();
    Eigen::MatrixXd E = Eigen::MatrixXd::Zero(n, n);
    for (const auto& e : g.edges) {
        double c = plain ? 1.0 : e.conductance;
        E(e.i, e.i) += c;
        E(e.j, e.j) += c;
        E(e.i, e.j) -= c;
        E(e.j, e.i) -= c;
    }
    return E;
}

inline std::vector<int> interior(const fraclab::FractalGraph& g) {
    std::vector<int> r;
    for (int v = 0; v < g.size(); ++v) {
        bool b = false;
        for (int w : g.boundary) b = b || w == v;
        if (!b) r.push_back(v);
    }
    return r;
}

// eigenvalues of M^{-1} E on the given rows
inline Eigen::VectorXd spectrum(const fraclab::FractalGraph& g, const std::vector<int>& rows, bool plain) {
    Eigen::MatrixXd E = energy(g, plain);
    const int n = int(rows.size());
    Eigen::MatrixXd A(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            double ma = plain ? 1.0 : g.mass[std::size_t(rows[std::size_t(a)])];
            double mb = plain ? 1.0 : g.mass[std::size_t(rows[std::size_t(b)])];
            A(a, b) = E(rows[std::size_t(a)], rows[std::size_t(b)]) / std::sqrt(ma * mb);
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    return es.eigenvalues();
}

// effective resistance from the Moore-Penrose pseudo-inverse
inline double resistance(const fraclab::FractalGraph& g, int x, int y) {
    Eigen::MatrixXd E = energy(g, false);
    Eigen::MatrixXd P = E.completeOrthogonalDecomposition().pseudoInverse();
    return P(x, x) + P(y, y) - 2 * P(x, y);
}

}  // namespace oracle
