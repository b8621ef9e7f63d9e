#include "vep/grid.hpp"

#include <stdexcept>
#include <string>

namespace vep {

Grid Grid::make(int dim, std::array<int, 3> n, std::array<double, 3> length) {
    if (dim != 2 && dim != 3) throw std::invalid_argument("grid: dim must be 2 or 3");
    Grid g;
    g.dim = dim;
    for (int a = 0; a < 3; ++a) {
        if (a < dim) {
            if (n[a] < 4) throw std::invalid_argument("grid: n must be >= 4 on axis " + std::to_string(a));
            if (!(length[a] > 0.0)) throw std::invalid_argument("grid: length must be > 0 on axis " + std::to_string(a));
            g.n[a] = n[a];
            g.length[a] = length[a];
        } else {
            g.n[a] = 1;
            g.length[a] = 1.0;
        }
    }
    return g;
}

double Grid::cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < dim; ++a) v *= spacing(a);
    return v;
}

double Grid::volume() const {
    double v = 1.0;
    for (int a = 0; a < dim; ++a) v *= length[a];
    return v;
}

std::size_t Grid::cell_count() const {
    return static_cast<std::size_t>(n[0]) * n[1] * n[2];
}

Layout make_layout(const Grid& g, unsigned mask) {
    Layout L;
    for (int a = 0; a < 3; ++a) L.ext[a] = g.n[a] + ((a < g.dim && (mask >> a) & 1u) ? 1 : 0);
    L.stride = {1, static_cast<std::size_t>(L.ext[0]), static_cast<std::size_t>(L.ext[0]) * L.ext[1]};
    L.size = static_cast<std::size_t>(L.ext[0]) * L.ext[1] * L.ext[2];
    return L;
}

FaceIndexing::FaceIndexing(const Grid& g) {
    for (int a = 0; a < 3; ++a) {
        if (a < g.dim) {
            lay[a] = face_layout(g, a);
            offset[a] = total;
            total += lay[a].size;
        } else {
            lay[a] = Layout{};
            offset[a] = total;
        }
    }
}

EdgeIndexing::EdgeIndexing(const Grid& g) {
    for (int p = 0; p < 3; ++p) {
        if (p < g.pair_count()) {
            lay[p] = edge_layout(g, p);
            offset[p] = total;
            total += lay[p].size;
        } else {
            lay[p] = Layout{};
            offset[p] = total;
        }
    }
}

double node_coord(const Grid& g, int axis, int index, bool on_face) {
    const double h = g.spacing(axis);
    return on_face ? index * h : (index + 0.5) * h;
}

}  // namespace vep
