#pragma once

#include <cmath>
#include <functional>
#include <random>

#include "vep/fields.hpp"
#include "vep/operators.hpp"
#include "vep/random_fields.hpp"

namespace vep::testing {

inline ScalarField sample_cells(const Grid& g, const std::function<double(double, double, double)>& f) {
    ScalarField out(g);
    for_each_index(cell_layout(g), [&](const std::array<int, 3>& m, std::size_t c) {
        out.v[c] = f(node_coord(g, 0, m[0], false), node_coord(g, 1, m[1], false),
                     g.dim == 3 ? node_coord(g, 2, m[2], false) : 0.0);
    });
    return out;
}

// Component a of a vector function sampled at the a-faces (boundary faces included).
inline VectorField sample_faces(const Grid& g, const std::function<double(int, double, double, double)>& f,
                                BoundaryTag tag = BoundaryTag::Extrapolate) {
    VectorField u(g, tag);
    for (int a = 0; a < g.dim; ++a)
        for_each_index(face_layout(g, a), [&](const std::array<int, 3>& m, std::size_t i) {
            double x[3] = {0, 0, 0};
            for (int b = 0; b < g.dim; ++b) x[b] = node_coord(g, b, m[b], b == a);
            u.c[a][i] = f(a, x[0], x[1], x[2]);
        });
    return u;
}

}  // namespace vep::testing
