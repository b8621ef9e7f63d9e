#include "vep/operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "vep/stencil.hpp"

namespace vep {

namespace {

void require_same(const Grid& a, const Grid& b) {
    if (a != b) throw std::invalid_argument("fields live on different grids");
}

// Weight of sym row k in STF coefficient i: diagonal E_i[a][a], pair 2 E_i[a][b].
std::vector<std::array<double, 6>> sym_to_stf(int dim) {
    const auto& B = stf_basis(dim);
    std::vector<std::array<double, 6>> P(B.size());
    for (std::size_t i = 0; i < B.size(); ++i) {
        P[i].fill(0.0);
        for (int a = 0; a < dim; ++a) P[i][a] = B[i][a][a];
        for (int p = 0; p < (dim == 2 ? 1 : 3); ++p) P[i][dim + p] = 2.0 * B[i][kPairs[p][0]][kPairs[p][1]];
    }
    return P;
}

template <class EmitterCall>
SpMat build(std::size_t rows, std::size_t cols, EmitterCall&& call) {
    std::vector<Eigen::Triplet<double>> t;
    call([&](std::size_t r, std::size_t c, double w) { t.emplace_back(static_cast<int>(r), static_cast<int>(c), w); });
    SpMat M(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    M.setFromTriplets(t.begin(), t.end());
    return M;
}

double sum_sq_weighted(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

VectorField gradient(const ScalarField& f) {
    VectorField out(f.grid);
    const FaceIndexing fi(f.grid);
    std::vector<double> flat(fi.total, 0.0);
    stencil::gradient(f.grid, [&](std::size_t r, std::size_t c, double w) { flat[r] += w * f.v[c]; });
    unflatten(flat, out);
    return out;
}

ScalarField divergence(const VectorField& u) {
    ScalarField out(u.grid);
    const auto flat = flatten(u);
    stencil::divergence(u.grid, [&](std::size_t r, std::size_t c, double w) { out.v[r] += w * flat[c]; });
    return out;
}

ScalarField laplacian_neumann(const ScalarField& f) {
    ScalarField out(f.grid);
    stencil::laplacian(f.grid, [&](std::size_t r, std::size_t c, double w) { out.v[r] += w * f.v[c]; });
    return out;
}

StfField laplacian_neumann(const StfField& T) {
    StfField out(T.grid);
    const std::size_t N = T.cells();
    stencil::laplacian(T.grid, [&](std::size_t r, std::size_t c, double w) {
        for (int i = 0; i < T.ncomp; ++i) out.v[i * N + r] += w * T.v[i * N + c];
    });
    return out;
}

SymGrad sym_grad(const VectorField& u) {
    const Grid& g = u.grid;
    const std::size_t N = g.cell_count();
    const int nsym = g.dim + g.pair_count();
    std::vector<double> sym(nsym * N, 0.0);
    const auto flat = flatten(u);
    stencil::center_sym(g, u.tag, [&](std::size_t r, std::size_t c, double w) { sym[r] += w * flat[c]; });
    SymGrad out{StfField(g), ScalarField(g)};
    const auto P = sym_to_stf(g.dim);
    for (std::size_t c = 0; c < N; ++c) {
        double tr = 0.0;
        for (int a = 0; a < g.dim; ++a) tr += sym[a * N + c];
        out.trace.v[c] = tr;
        for (int i = 0; i < out.dev.ncomp; ++i) {
            double s = 0.0;
            for (int k = 0; k < nsym; ++k) s += P[i][k] * sym[k * N + c];
            out.dev.v[i * N + c] = s;
        }
    }
    return out;
}

AntisymField skw_grad(const VectorField& u) {
    AntisymField out(u.grid);
    const auto flat = flatten(u);
    stencil::center_skw(u.grid, u.tag, [&](std::size_t r, std::size_t c, double w) { out.v[r] += w * flat[c]; });
    return out;
}

VectorField tensor_divergence(const StfField& T) {
    const Grid& g = T.grid;
    const std::size_t N = g.cell_count();
    const int nsym = g.dim + g.pair_count();
    const auto P = sym_to_stf(g.dim);
    std::vector<double> y(nsym * N, 0.0);
    for (std::size_t c = 0; c < N; ++c)
        for (int k = 0; k < nsym; ++k) {
            double s = 0.0;
            for (int i = 0; i < T.ncomp; ++i) s += P[i][k] * T.v[i * N + c];
            y[k * N + c] = s;
        }
    const FaceIndexing fi(g);
    std::vector<double> flat(fi.total, 0.0);
    stencil::center_sym(g, BoundaryTag::NoSlip, [&](std::size_t r, std::size_t c, double w) { flat[c] -= w * y[r]; });
    VectorField out(g);
    unflatten(flat, out);
    out.enforce_no_slip();
    return out;
}

ScalarField advect_scalar(const VectorField& u, const ScalarField& f) {
    require_same(u.grid, f.grid);
    ScalarField out(f.grid);
    stencil::advect(u, [&](std::size_t r, std::size_t c, double w) { out.v[r] += w * f.v[c]; });
    return out;
}

StfField advect_tensor(const VectorField& u, const StfField& T) {
    require_same(u.grid, T.grid);
    StfField out(T.grid);
    const std::size_t N = T.cells();
    stencil::advect(u, [&](std::size_t r, std::size_t c, double w) {
        for (int i = 0; i < T.ncomp; ++i) out.v[i * N + r] += w * T.v[i * N + c];
    });
    return out;
}

StfField jaumann_commutator(const StfField& T, const AntisymField& W) {
    require_same(T.grid, W.grid);
    const Grid& g = T.grid;
    const int d = g.dim;
    const std::size_t N = T.cells();
    StfField out(g);
    std::vector<double> tc(T.ncomp), rc(T.ncomp);
    for (std::size_t c = 0; c < N; ++c) {
        for (int i = 0; i < T.ncomp; ++i) tc[i] = T.v[i * N + c];
        const Mat3 S = stf_to_matrix(d, tc.data());
        Mat3 Wm{};
        for (int p = 0; p < W.npair; ++p) {
            Wm[kPairs[p][0]][kPairs[p][1]] = W.v[p * N + c];
            Wm[kPairs[p][1]][kPairs[p][0]] = -W.v[p * N + c];
        }
        Mat3 R{};
        for (int r = 0; r < d; ++r)
            for (int s = 0; s < d; ++s) {
                double acc = 0.0;
                for (int k = 0; k < d; ++k) acc += S[r][k] * Wm[k][s] - Wm[r][k] * S[k][s];
                R[r][s] = acc;
            }
        matrix_to_stf(d, R, rc.data());
        for (int i = 0; i < T.ncomp; ++i) out.v[i * N + c] = rc[i];
    }
    return out;
}

VectorField advect_adjoint_velocity(const ScalarField& mu, const ScalarField& phi) {
    require_same(mu.grid, phi.grid);
    const Grid& g = mu.grid;
    VectorField out(g);
    const Layout C = cell_layout(g);
    for (int a = 0; a < g.dim; ++a) {
        const double h = g.spacing(a);
        const Layout F = face_layout(g, a);
        for_each_index(F, [&](const std::array<int, 3>& m, std::size_t i) {
            if (m[a] == 0 || m[a] == g.n[a]) return;
            auto l = m;
            l[a] -= 1;
            const std::size_t L = C.at(l), R = C.at(m);
            out.c[a][i] = 0.5 * (phi.v[L] + phi.v[R]) * (mu.v[L] - mu.v[R]) / h;
        });
    }
    return out;
}

VectorField curl_edge_potential(const Grid& g, std::vector<double> A) {
    const EdgeIndexing ei(g);
    if (A.size() != ei.total) throw std::invalid_argument("curl_edge_potential: potential size mismatch");
    for (int p = 0; p < g.pair_count(); ++p) {
        const int a = kPairs[p][0], b = kPairs[p][1];
        for_each_index(ei.lay[p], [&](const std::array<int, 3>& e, std::size_t i) {
            if (e[a] == 0 || e[a] == g.n[a] || e[b] == 0 || e[b] == g.n[b]) A[ei.offset[p] + i] = 0.0;
        });
    }
    auto pair_of = [](int a, int b) {
        const int lo = a < b ? a : b, hi = a < b ? b : a;
        return lo == 0 ? (hi == 1 ? 0 : 1) : 2;
    };
    VectorField u(g);
    for (int a = 0; a < g.dim; ++a) {
        const Layout F = face_layout(g, a);
        for_each_index(F, [&](const std::array<int, 3>& f, std::size_t i) {
            double s = 0.0;
            for (int b = 0; b < 3; ++b) {
                if (b == a) continue;
                const int c = 3 - a - b;
                if (b >= g.dim) continue;
                if (g.dim == 2 && c != 2) continue;
                const double eps = ((a + 1) % 3 == b) ? 1.0 : -1.0;
                const int p = pair_of(a, b);
                auto e1 = f, e0 = f;
                e1[b] = f[b] + 1;
                e0[b] = f[b];
                s += eps * (A[ei.offset[p] + ei.lay[p].at(e1)] - A[ei.offset[p] + ei.lay[p].at(e0)]) / g.spacing(b);
            }
            u.c[a][i] = s;
        });
    }
    return u;
}

VectorField face_average(const ScalarField& f) {
    const Grid& g = f.grid;
    VectorField out(g, BoundaryTag::Extrapolate);
    const Layout C = cell_layout(g);
    for (int a = 0; a < g.dim; ++a) {
        const Layout F = face_layout(g, a);
        for_each_index(F, [&](const std::array<int, 3>& m, std::size_t i) {
            auto l = m;
            l[a] -= 1;
            if (m[a] == 0) out.c[a][i] = f.v[C.at(m)];
            else if (m[a] == g.n[a]) out.c[a][i] = f.v[C.at(l)];
            else out.c[a][i] = 0.5 * (f.v[C.at(l)] + f.v[C.at(m)]);
        });
    }
    return out;
}

std::array<ScalarField, 3> center_average(const VectorField& u) {
    const Grid& g = u.grid;
    std::array<ScalarField, 3> out{ScalarField(g), ScalarField(g), ScalarField(g)};
    const Layout C = cell_layout(g);
    for (int a = 0; a < g.dim; ++a) {
        const Layout F = face_layout(g, a);
        for_each_index(C, [&](const std::array<int, 3>& m, std::size_t c) {
            auto p = m;
            p[a] += 1;
            out[a].v[c] = 0.5 * (u.c[a][F.at(m)] + u.c[a][F.at(p)]);
        });
    }
    return out;
}

double face_weight(const Grid& g, int axis, const std::array<int, 3>& m) {
    double w = g.cell_volume();
    if (m[axis] == 0 || m[axis] == g.n[axis]) w *= 0.5;
    return w;
}

double inner_l2(const ScalarField& a, const ScalarField& b) {
    require_same(a.grid, b.grid);
    return sum_sq_weighted(a.v, b.v) * a.grid.cell_volume();
}

double inner_l2(const VectorField& a, const VectorField& b) {
    require_same(a.grid, b.grid);
    double s = 0.0;
    for (int k = 0; k < a.grid.dim; ++k) {
        const Layout F = face_layout(a.grid, k);
        for_each_index(F, [&](const std::array<int, 3>& m, std::size_t i) {
            s += face_weight(a.grid, k, m) * a.c[k][i] * b.c[k][i];
        });
    }
    return s;
}

double inner_l2(const StfField& a, const StfField& b) {
    require_same(a.grid, b.grid);
    return sum_sq_weighted(a.v, b.v) * a.grid.cell_volume();
}

double norm_l2(const ScalarField& a) { return std::sqrt(inner_l2(a, a)); }
double norm_l2(const VectorField& a) { return std::sqrt(inner_l2(a, a)); }
double norm_l2(const StfField& a) { return std::sqrt(inner_l2(a, a)); }

double norm_linf(const ScalarField& a) {
    double m = 0.0;
    for (double x : a.v) m = std::max(m, std::abs(x));
    return m;
}

double norm_linf(const VectorField& a) {
    double m = 0.0;
    for (int k = 0; k < a.grid.dim; ++k)
        for (double x : a.c[k]) m = std::max(m, std::abs(x));
    return m;
}

double norm_linf(const StfField& a) {
    double m = 0.0;
    const std::size_t N = a.cells();
    for (std::size_t c = 0; c < N; ++c) {
        double s = 0.0;
        for (int i = 0; i < a.ncomp; ++i) s += a.v[i * N + c] * a.v[i * N + c];
        m = std::max(m, s);
    }
    return std::sqrt(m);
}

double gradient_inner(const ScalarField& f, const ScalarField& q) {
    require_same(f.grid, q.grid);
    const Grid& g = f.grid;
    const Layout C = cell_layout(g);
    double s = 0.0;
    for_each_index(C, [&](const std::array<int, 3>& m, std::size_t c) {
        for (int a = 0; a < g.dim; ++a) {
            auto u = m;
            u[a] += 1;
            if (u[a] >= g.n[a]) continue;
            const double h = g.spacing(a);
            const std::size_t cu = C.at(u);
            s += (f.v[cu] - f.v[c]) * (q.v[cu] - q.v[c]) / (h * h);
        }
    });
    return s * g.cell_volume();
}

double gradient_energy(const ScalarField& f) { return gradient_inner(f, f); }

double gradient_energy(const StfField& T) {
    const std::size_t N = T.cells();
    double s = 0.0;
    for (int i = 0; i < T.ncomp; ++i) {
        ScalarField comp(T.grid);
        std::copy(T.v.begin() + i * N, T.v.begin() + (i + 1) * N, comp.v.begin());
        s += gradient_energy(comp);
    }
    return s;
}

SpMat gradient_matrix(const Grid& g) {
    return build(FaceIndexing(g).total, g.cell_count(), [&](auto&& e) { stencil::gradient(g, e); });
}

SpMat divergence_matrix(const Grid& g) {
    return build(g.cell_count(), FaceIndexing(g).total, [&](auto&& e) { stencil::divergence(g, e); });
}

SpMat laplacian_matrix(const Grid& g) {
    return build(g.cell_count(), g.cell_count(), [&](auto&& e) { stencil::laplacian(g, e); });
}

SpMat strain_matrix(const Grid& g, BoundaryTag tag) {
    const std::size_t rows = g.dim * g.cell_count() + EdgeIndexing(g).total;
    return build(rows, FaceIndexing(g).total, [&](auto&& e) { stencil::strain(g, tag, e); });
}

SpMat stf_symgrad_matrix(const Grid& g, BoundaryTag tag) {
    const std::size_t N = g.cell_count();
    const int ncomp = g.stf_components();
    const auto P = sym_to_stf(g.dim);
    return build(ncomp * N, FaceIndexing(g).total, [&](auto&& e) {
        stencil::center_sym(g, tag, [&](std::size_t r, std::size_t c, double w) {
            const std::size_t k = r / N, cell = r % N;
            for (int i = 0; i < ncomp; ++i)
                if (P[i][k] != 0.0) e(i * N + cell, c, P[i][k] * w);
        });
    });
}

SpMat skw_matrix(const Grid& g, BoundaryTag tag) {
    return build(g.pair_count() * g.cell_count(), FaceIndexing(g).total,
                 [&](auto&& e) { stencil::center_skw(g, tag, e); });
}

SpMat advect_matrix(const VectorField& u) {
    const std::size_t N = u.grid.cell_count();
    return build(N, N, [&](auto&& e) { stencil::advect(u, e); });
}

SpMat skew_convection_matrix(const VectorField& mflux) {
    const std::size_t n = FaceIndexing(mflux.grid).total;
    return build(n, n, [&](auto&& e) { stencil::skew_convection(mflux, e); });
}

}  // namespace vep
