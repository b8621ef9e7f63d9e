#pragma once

// Every linear discrete operator is written once as an emitter that reports its
// entries as emit(row, col, coeff) in global index spaces:
//   cells: Layout index; faces: FaceIndexing; edges: EdgeIndexing;
//   strain rows: [normal a: a*N + cell] then [shear p: d*N + edge];
//   symmetric-gradient rows: [diag a: a*N + cell] then [pair p: (d+p)*N + cell];
//   antisymmetric rows: p*N + cell.
// Field-level functions and sparse matrices are both built from these emitters.

#include <array>

#include "vep/fields.hpp"
#include "vep/grid.hpp"

namespace vep::stencil {

// Emit the value of velocity component a at face multi-index m, resolving one
// out-of-range tangential index through the wall policy.
template <class Col>
void face_value(const Grid& g, const FaceIndexing& fi, BoundaryTag tag, int a, std::array<int, 3> m, double w,
                Col&& col) {
    for (int b = 0; b < g.dim; ++b) {
        if (b == a) continue;
        if (m[b] == -1 || m[b] == g.n[b]) {
            const bool low = m[b] == -1;
            const int in0 = low ? 0 : g.n[b] - 1;
            const int in1 = low ? 1 : g.n[b] - 2;
            if (tag == BoundaryTag::NoSlip) {
                m[b] = in0;
                col(fi.offset[a] + fi.lay[a].at(m), -w);
            } else {
                auto m1 = m;
                m[b] = in0;
                m1[b] = in1;
                col(fi.offset[a] + fi.lay[a].at(m), 2.0 * w);
                col(fi.offset[a] + fi.lay[a].at(m1), -w);
            }
            return;
        }
    }
    col(fi.offset[a] + fi.lay[a].at(m), w);
}

// d_b v_a + sign * d_a v_b at edge node e of the (a,b) plane, times `scale`.
template <class Col>
void edge_shear(const Grid& g, const FaceIndexing& fi, BoundaryTag tag, int a, int b, const std::array<int, 3>& e,
                double sign, double scale, Col&& col) {
    const double hb = g.spacing(b), ha = g.spacing(a);
    auto m = e;
    face_value(g, fi, tag, a, m, scale / hb, col);
    m[b] = e[b] - 1;
    face_value(g, fi, tag, a, m, -scale / hb, col);
    m = e;
    face_value(g, fi, tag, b, m, sign * scale / ha, col);
    m[a] = e[a] - 1;
    face_value(g, fi, tag, b, m, -sign * scale / ha, col);
}

template <class Emit>
void gradient(const Grid& g, Emit&& emit) {
    const FaceIndexing fi(g);
    const Layout C = cell_layout(g);
    for (int a = 0; a < g.dim; ++a) {
        const double h = g.spacing(a);
        for_each_index(fi.lay[a], [&](const std::array<int, 3>& m, std::size_t i) {
            if (m[a] == 0 || m[a] == g.n[a]) return;
            auto l = m;
            l[a] -= 1;
            emit(fi.offset[a] + i, C.at(m), 1.0 / h);
            emit(fi.offset[a] + i, C.at(l), -1.0 / h);
        });
    }
}

template <class Emit>
void divergence(const Grid& g, Emit&& emit) {
    const FaceIndexing fi(g);
    const Layout C = cell_layout(g);
    for_each_index(C, [&](const std::array<int, 3>& m, std::size_t c) {
        for (int a = 0; a < g.dim; ++a) {
            const double h = g.spacing(a);
            auto u = m;
            u[a] += 1;
            emit(c, fi.offset[a] + fi.lay[a].at(u), 1.0 / h);
            emit(c, fi.offset[a] + fi.lay[a].at(m), -1.0 / h);
        }
    });
}

template <class Emit>
void laplacian(const Grid& g, Emit&& emit) {
    const Layout C = cell_layout(g);
    for_each_index(C, [&](const std::array<int, 3>& m, std::size_t c) {
        for (int a = 0; a < g.dim; ++a) {
            const double w = 1.0 / (g.spacing(a) * g.spacing(a));
            for (int s : {-1, 1}) {
                auto nb = m;
                nb[a] += s;
                if (nb[a] < 0 || nb[a] >= g.n[a]) continue;
                emit(c, C.at(nb), w);
                emit(c, c, -w);
            }
        }
    });
}

// Strain rows: normal d_a v_a at cells, engineering shear d_b v_a + d_a v_b at edges.
template <class Emit>
void strain(const Grid& g, BoundaryTag tag, Emit&& emit) {
    const FaceIndexing fi(g);
    const EdgeIndexing ei(g);
    const Layout C = cell_layout(g);
    const std::size_t N = C.size;
    for (int a = 0; a < g.dim; ++a) {
        const double h = g.spacing(a);
        for_each_index(C, [&](const std::array<int, 3>& m, std::size_t c) {
            auto u = m;
            u[a] += 1;
            emit(a * N + c, fi.offset[a] + fi.lay[a].at(u), 1.0 / h);
            emit(a * N + c, fi.offset[a] + fi.lay[a].at(m), -1.0 / h);
        });
    }
    for (int p = 0; p < g.pair_count(); ++p) {
        const int a = kPairs[p][0], b = kPairs[p][1];
        for_each_index(ei.lay[p], [&](const std::array<int, 3>& e, std::size_t i) {
            const std::size_t row = g.dim * N + ei.offset[p] + i;
            edge_shear(g, fi, tag, a, b, e, 1.0, 1.0, [&](std::size_t col, double w) { emit(row, col, w); });
        });
    }
}

// Cell-centered symmetric gradient: diagonal from the compact face difference,
// off-diagonal as the mean of the four surrounding edge values.
template <class Emit>
void center_sym(const Grid& g, BoundaryTag tag, Emit&& emit) {
    const FaceIndexing fi(g);
    const Layout C = cell_layout(g);
    const std::size_t N = C.size;
    for_each_index(C, [&](const std::array<int, 3>& m, std::size_t c) {
        for (int a = 0; a < g.dim; ++a) {
            const double h = g.spacing(a);
            auto u = m;
            u[a] += 1;
            emit(a * N + c, fi.offset[a] + fi.lay[a].at(u), 1.0 / h);
            emit(a * N + c, fi.offset[a] + fi.lay[a].at(m), -1.0 / h);
        }
        for (int p = 0; p < g.pair_count(); ++p) {
            const int a = kPairs[p][0], b = kPairs[p][1];
            const std::size_t row = (g.dim + p) * N + c;
            for (int da = 0; da < 2; ++da)
                for (int db = 0; db < 2; ++db) {
                    auto e = m;
                    e[a] += da;
                    e[b] += db;
                    edge_shear(g, fi, tag, a, b, e, 1.0, 0.125, [&](std::size_t col, double w) { emit(row, col, w); });
                }
        }
    });
}

// Cell-centered skw(grad v)_(a,b) = (d_b v_a - d_a v_b)/2, averaged from edges.
template <class Emit>
void center_skw(const Grid& g, BoundaryTag tag, Emit&& emit) {
    const FaceIndexing fi(g);
    const Layout C = cell_layout(g);
    const std::size_t N = C.size;
    for_each_index(C, [&](const std::array<int, 3>& m, std::size_t c) {
        for (int p = 0; p < g.pair_count(); ++p) {
            const int a = kPairs[p][0], b = kPairs[p][1];
            for (int da = 0; da < 2; ++da)
                for (int db = 0; db < 2; ++db) {
                    auto e = m;
                    e[a] += da;
                    e[b] += db;
                    edge_shear(g, fi, tag, a, b, e, -1.0, 0.125,
                               [&](std::size_t col, double w) { emit(p * N + c, col, w); });
                }
        }
    });
}

// Conservative centered transport f -> div(u f) for a fixed face velocity u.
template <class Emit>
void advect(const VectorField& u, Emit&& emit) {
    const Grid& g = u.grid;
    const Layout C = cell_layout(g);
    for_each_index(C, [&](const std::array<int, 3>& m, std::size_t c) {
        for (int a = 0; a < g.dim; ++a) {
            const double h = g.spacing(a);
            const Layout& F = face_layout(g, a);
            auto up = m;
            up[a] += 1;
            const double uu = u.c[a][F.at(up)];
            const double ul = u.c[a][F.at(m)];
            if (up[a] < g.n[a]) {
                emit(c, c, 0.5 * uu / h);
                emit(c, C.at(up), 0.5 * uu / h);
            } else {
                emit(c, c, uu / h);
            }
            auto lo = m;
            lo[a] -= 1;
            if (lo[a] >= 0) {
                emit(c, c, -0.5 * ul / h);
                emit(c, C.at(lo), -0.5 * ul / h);
            } else {
                emit(c, c, -ul / h);
            }
        }
    });
}

// Skew-symmetric momentum convection K(m)v = (div(m (x) v) + m.grad v)/2 on the
// MAC grid; rows restricted to interior faces.
template <class Emit>
void skew_convection(const VectorField& mflux, Emit&& emit) {
    const Grid& g = mflux.grid;
    const FaceIndexing fi(g);
    for (int a = 0; a < g.dim; ++a) {
        for_each_index(fi.lay[a], [&](const std::array<int, 3>& f, std::size_t i) {
            if (f[a] == 0 || f[a] == g.n[a]) return;
            const std::size_t row = fi.offset[a] + i;
            auto col = [&](std::size_t c, double w) { emit(row, c, w); };
            for (int b = 0; b < g.dim; ++b) {
                const double h2 = 2.0 * g.spacing(b);
                double Fp, Fm;
                if (b == a) {
                    auto fp = f, fm = f;
                    fp[a] += 1;
                    fm[a] -= 1;
                    const double m0 = mflux.c[a][fi.lay[a].at(f)];
                    Fp = 0.5 * (m0 + mflux.c[a][fi.lay[a].at(fp)]);
                    Fm = 0.5 * (m0 + mflux.c[a][fi.lay[a].at(fm)]);
                } else {
                    auto q0 = f, q1 = f;
                    q0[a] = f[a] - 1;
                    q1[a] = f[a];
                    q0[b] = q1[b] = f[b] + 1;
                    Fp = 0.5 * (mflux.c[b][fi.lay[b].at(q0)] + mflux.c[b][fi.lay[b].at(q1)]);
                    q0[b] = q1[b] = f[b];
                    Fm = 0.5 * (mflux.c[b][fi.lay[b].at(q0)] + mflux.c[b][fi.lay[b].at(q1)]);
                }
                auto np = f, nm = f;
                np[b] += 1;
                nm[b] -= 1;
                face_value(g, fi, BoundaryTag::NoSlip, a, np, Fp / h2, col);
                face_value(g, fi, BoundaryTag::NoSlip, a, nm, -Fm / h2, col);
            }
        });
    }
}

}  // namespace vep::stencil
