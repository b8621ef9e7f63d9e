#pragma once

#include <array>
#include <cstddef>

namespace vep {

// Uniform rectangular grid on [0,L0]x[0,L1](x[0,L2]). Unused axes have n=1.
struct Grid {
    int dim = 2;
    std::array<int, 3> n{1, 1, 1};
    std::array<double, 3> length{1.0, 1.0, 1.0};

    static Grid make(int dim, std::array<int, 3> n, std::array<double, 3> length);
    static Grid square(int n, double length = 1.0) { return make(2, {n, n, 1}, {length, length, 1.0}); }

    double spacing(int axis) const { return length[axis] / n[axis]; }
    double cell_volume() const;
    double volume() const;
    std::size_t cell_count() const;
    int pair_count() const { return dim == 2 ? 1 : 3; }
    int stf_components() const { return dim == 2 ? 2 : 5; }

    bool operator==(const Grid& o) const { return dim == o.dim && n == o.n && length == o.length; }
    bool operator!=(const Grid& o) const { return !(*this == o); }
};

// Axis pairs (a<b) in the order used for off-diagonal tensor entries and edges.
constexpr std::array<std::array<int, 2>, 3> kPairs{{{0, 1}, {0, 2}, {1, 2}}};

// Index layout of a staggered array. Bit a of `mask` set means the array sits on
// the n[a]+1 nodes of axis a instead of the n[a] cell centers.
struct Layout {
    std::array<int, 3> ext{1, 1, 1};
    std::array<std::size_t, 3> stride{1, 1, 1};
    std::size_t size = 0;

    std::size_t at(int i, int j, int k) const { return i * stride[0] + j * stride[1] + k * stride[2]; }
    std::size_t at(const std::array<int, 3>& m) const { return at(m[0], m[1], m[2]); }
    bool contains(const std::array<int, 3>& m) const {
        for (int a = 0; a < 3; ++a)
            if (m[a] < 0 || m[a] >= ext[a]) return false;
        return true;
    }
};

Layout make_layout(const Grid& g, unsigned mask);
inline Layout cell_layout(const Grid& g) { return make_layout(g, 0u); }
inline Layout face_layout(const Grid& g, int axis) { return make_layout(g, 1u << axis); }
inline Layout edge_layout(const Grid& g, int p) {
    return make_layout(g, (1u << kPairs[p][0]) | (1u << kPairs[p][1]));
}

template <class F>
void for_each_index(const Layout& L, F&& f) {
    std::array<int, 3> m{};
    for (m[2] = 0; m[2] < L.ext[2]; ++m[2])
        for (m[1] = 0; m[1] < L.ext[1]; ++m[1])
            for (m[0] = 0; m[0] < L.ext[0]; ++m[0]) f(m, L.at(m));
}

// Global numbering of all face values (components concatenated) and all edge values.
struct FaceIndexing {
    std::array<Layout, 3> lay;
    std::array<std::size_t, 3> offset{0, 0, 0};
    std::size_t total = 0;
    explicit FaceIndexing(const Grid& g);
};

struct EdgeIndexing {
    std::array<Layout, 3> lay;
    std::array<std::size_t, 3> offset{0, 0, 0};
    std::size_t total = 0;
    explicit EdgeIndexing(const Grid& g);
};

// Physical coordinates of staggered nodes.
double node_coord(const Grid& g, int axis, int index, bool on_face);

}  // namespace vep
