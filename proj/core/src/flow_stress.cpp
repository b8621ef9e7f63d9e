#include "vep/flow_stress.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace vep {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

double max_abs(const std::vector<double>& x) {
    double m = 0.0;
    for (double a : x) m = std::max(m, std::abs(a));
    return m;
}

// Mean cell value around each edge of pair p.
std::vector<double> edge_mean(const ScalarField& f, int p) {
    const Grid& g = f.grid;
    const Layout C = cell_layout(g);
    const Layout E = edge_layout(g, p);
    const int a = kPairs[p][0], b = kPairs[p][1];
    std::vector<double> out(E.size, 0.0);
    for_each_index(E, [&](const std::array<int, 3>& e, std::size_t i) {
        double s = 0.0;
        int cnt = 0;
        for (int da = -1; da <= 0; ++da)
            for (int db = -1; db <= 0; ++db) {
                auto m = e;
                m[a] += da;
                m[b] += db;
                if (m[a] < 0 || m[a] >= g.n[a] || m[b] < 0 || m[b] >= g.n[b]) continue;
                s += f.v[C.at(m)];
                ++cnt;
            }
        out[i] = s / cnt;
    });
    return out;
}

std::vector<double> strain_weights(const Grid& g, const ScalarField& nu) {
    const std::size_t N = g.cell_count();
    const EdgeIndexing ei(g);
    std::vector<double> w(g.dim * N + ei.total);
    const double vol = g.cell_volume();
    for (int a = 0; a < g.dim; ++a)
        for (std::size_t c = 0; c < N; ++c) w[a * N + c] = 2.0 * nu.v[c] * vol;
    // Trapezoid weights: wall edges carry half the volume per wall they touch.
    for (int p = 0; p < g.pair_count(); ++p) {
        const auto ne = edge_mean(nu, p);
        const int a = kPairs[p][0], b = kPairs[p][1];
        for_each_index(ei.lay[p], [&](const std::array<int, 3>& e, std::size_t i) {
            double q = vol;
            if (e[a] == 0 || e[a] == g.n[a]) q *= 0.5;
            if (e[b] == 0 || e[b] == g.n[b]) q *= 0.5;
            w[g.dim * N + ei.offset[p] + i] = ne[i] * q;
        });
    }
    return w;
}

// Global face index -> unknown index, -1 on boundary-normal faces.
std::vector<long> interior_face_map(const Grid& g, std::size_t& count) {
    const FaceIndexing fi(g);
    std::vector<long> map(fi.total, -1);
    count = 0;
    for (int a = 0; a < g.dim; ++a)
        for_each_index(fi.lay[a], [&](const std::array<int, 3>& m, std::size_t i) {
            if (m[a] == 0 || m[a] == g.n[a]) return;
            map[fi.offset[a] + i] = static_cast<long>(count++);
        });
    return map;
}

}  // namespace

State State::zero(const Grid& g) {
    State s;
    s.v = VectorField(g);
    s.S = StfField(g);
    s.phi = ScalarField(g);
    s.mu = ScalarField(g);
    s.p = ScalarField(g);
    return s;
}

ScalarField density_field(const ScalarField& phi, const MaterialParams& params) {
    ScalarField r(phi.grid);
    for (std::size_t c = 0; c < phi.size(); ++c) r.v[c] = density_of_phi(params, phi.v[c]);
    return r;
}

ScalarField coefficient_field(const ScalarField& phi, const PhaseCoefficient& coef) {
    ScalarField r(phi.grid);
    for (std::size_t c = 0; c < phi.size(); ++c) r.v[c] = coef(phi.v[c]);
    return r;
}

VectorField relative_flux(const ScalarField& mu, const MaterialParams& params) {
    return (-0.5 * (params.rho2 - params.rho1)) * gradient(mu);
}

double viscous_dissipation(const VectorField& v, const ScalarField& nu) {
    const Grid& g = v.grid;
    const SpMat E = strain_matrix(g, BoundaryTag::NoSlip);
    const auto flat = flatten(v);
    const Eigen::VectorXd e = E * Eigen::Map<const Eigen::VectorXd>(flat.data(), flat.size());
    const auto w = strain_weights(g, nu);
    double s = 0.0;
    for (Eigen::Index i = 0; i < e.size(); ++i) s += w[i] * e[i] * e[i];
    return s;
}

SpMat viscous_matrix(const Grid& g, const ScalarField& nu) {
    const SpMat E = strain_matrix(g, BoundaryTag::NoSlip);
    const auto w = strain_weights(g, nu);
    Eigen::VectorXd wv(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) wv[i] = w[i] / g.cell_volume();
    SpMat V = SpMat(E.transpose()) * wv.asDiagonal() * E;
    V.prune(0.0);
    return V;
}

MomentumSolution solve_momentum_step(const MomentumStepProblem& pr) {
    if (!(pr.h > 0.0)) throw std::invalid_argument("solve_momentum_step: h must be > 0");
    const Grid& g = pr.v_k.grid;
    const std::size_t N = g.cell_count();
    const FaceIndexing fi(g);
    std::size_t nv = 0;
    const auto fmap = interior_face_map(g, nv);
    const std::size_t n = nv + N;

    const VectorField rho_k = face_average(pr.rho_k);
    const VectorField rho_n = face_average(pr.rho_next);
    VectorField mflux(g);
    for (int a = 0; a < g.dim; ++a)
        for (std::size_t i = 0; i < mflux.c[a].size(); ++i)
            mflux.c[a][i] = rho_k.c[a][i] * pr.v_conv.c[a][i] + pr.J_next.c[a][i];

    const SpMat K = skew_convection_matrix(mflux);
    const SpMat V = viscous_matrix(g, coefficient_field(pr.phi_k, pr.params.nu));
    const SpMat G = gradient_matrix(g);
    const SpMat D = divergence_matrix(g);

    StfField etaS(g);
    const ScalarField eta = coefficient_field(pr.phi_k, pr.params.eta);
    for (int i = 0; i < etaS.ncomp; ++i)
        for (std::size_t c = 0; c < N; ++c) etaS.v[i * N + c] = eta.v[c] * pr.S.v[i * N + c];
    const VectorField rhs_field =
        advect_adjoint_velocity(pr.mu_next, pr.phi_k) + pr.f + tensor_divergence(etaS);

    Triplets t;
    t.reserve(K.nonZeros() + V.nonZeros() + 4 * fi.total + 4 * N);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (int a = 0; a < g.dim; ++a)
        for (std::size_t i = 0; i < fi.lay[a].size; ++i) {
            const long r = fmap[fi.offset[a] + i];
            if (r < 0) continue;
            t.emplace_back(r, r, 0.5 * (rho_n.c[a][i] + rho_k.c[a][i]) / pr.h);
            rhs[r] = rho_k.c[a][i] * pr.v_k.c[a][i] / pr.h + rhs_field.c[a][i];
        }
    auto add_rows = [&](const SpMat& M) {
        for (Eigen::Index gi = 0; gi < M.rows(); ++gi) {
            const long r = fmap[gi];
            if (r < 0) continue;
            for (SpMat::InnerIterator it(M, gi); it; ++it) {
                const long cidx = fmap[it.col()];
                if (cidx >= 0) t.emplace_back(r, cidx, it.value());
            }
        }
    };
    add_rows(K);
    add_rows(V);
    for (Eigen::Index gi = 0; gi < G.rows(); ++gi) {
        const long r = fmap[gi];
        if (r < 0) continue;
        for (SpMat::InnerIterator it(G, gi); it; ++it) t.emplace_back(r, nv + it.col(), it.value());
    }
    // Continuity rows; the row of cell 0 is redundant and carries the pressure gauge.
    for (Eigen::Index c = 0; c < D.rows(); ++c) {
        if (c == 0) {
            t.emplace_back(nv, nv, 1.0);
            continue;
        }
        for (SpMat::InnerIterator it(D, c); it; ++it) {
            const long cidx = fmap[it.col()];
            if (cidx >= 0) t.emplace_back(nv + c, cidx, -it.value());
        }
    }
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(t.begin(), t.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) throw LinearSolveFailure("solve_momentum_step: saddle-point factorization failed");
    Eigen::VectorXd x = lu.solve(rhs);
    x += lu.solve(rhs - A * x);  // one refinement sweep
    if (lu.info() != Eigen::Success || !x.allFinite())
        throw LinearSolveFailure("solve_momentum_step: saddle-point solve failed");

    MomentumSolution s;
    s.v = VectorField(g);
    for (int a = 0; a < g.dim; ++a)
        for (std::size_t i = 0; i < s.v.c[a].size(); ++i) {
            const long r = fmap[fi.offset[a] + i];
            if (r >= 0) s.v.c[a][i] = x[r];
        }
    s.pressure = ScalarField(g);
    double mean = 0.0;
    for (std::size_t c = 0; c < N; ++c) mean += x[nv + c];
    mean /= N;
    for (std::size_t c = 0; c < N; ++c) s.pressure.v[c] = x[nv + c] - mean;
    s.div_residual = norm_linf(divergence(s.v));
    return s;
}

SpMat stress_operator_matrix(const VectorField& v, double gamma) {
    const Grid& g = v.grid;
    const std::size_t N = g.cell_count();
    const int nc = g.stf_components();
    const SpMat A = advect_matrix(v);
    const SpMat L = laplacian_matrix(g);
    const AntisymField W = skw_grad(v);
    const auto& basis = stf_basis(g.dim);
    Triplets t;
    t.reserve(nc * (A.nonZeros() + L.nonZeros() + nc * N));
    for (int i = 0; i < nc; ++i) {
        for (Eigen::Index r = 0; r < A.rows(); ++r)
            for (SpMat::InnerIterator it(A, r); it; ++it) t.emplace_back(i * N + r, i * N + it.col(), it.value());
        if (gamma != 0.0)
            for (Eigen::Index r = 0; r < L.rows(); ++r)
                for (SpMat::InnerIterator it(L, r); it; ++it)
                    t.emplace_back(i * N + r, i * N + it.col(), -gamma * it.value());
    }
    for (std::size_t c = 0; c < N; ++c) {
        Mat3 Wm{};
        for (int p = 0; p < W.npair; ++p) {
            Wm[kPairs[p][0]][kPairs[p][1]] = W.v[p * N + c];
            Wm[kPairs[p][1]][kPairs[p][0]] = -W.v[p * N + c];
        }
        for (int j = 0; j < nc; ++j) {
            const Mat3& B = basis[j];
            Mat3 R{};
            for (int r = 0; r < g.dim; ++r)
                for (int s = 0; s < g.dim; ++s)
                    for (int k = 0; k < g.dim; ++k) R[r][s] += B[r][k] * Wm[k][s] - Wm[r][k] * B[k][s];
            for (int i = 0; i < nc; ++i) {
                const double cij = frob(basis[i], R);
                if (cij != 0.0) t.emplace_back(i * N + c, j * N + c, cij);
            }
        }
    }
    SpMat M(nc * N, nc * N);
    M.setFromTriplets(t.begin(), t.end());
    return M;
}

StfField stress_rhs(const StressStepProblem& p) {
    const Grid& g = p.S_k.grid;
    const std::size_t N = g.cell_count();
    const StfField D = sym_grad(p.v_next).dev;
    StfField b = p.S_k;
    for (int i = 0; i < b.ncomp; ++i)
        for (std::size_t c = 0; c < N; ++c) b.v[i * N + c] += p.h * p.params.eta(p.phi_k.v[c]) * D.v[i * N + c];
    return b;
}

StfField prox_field(const StfField& Z, const ScalarField& phi, const PlasticParams& pp, double h) {
    const std::size_t N = Z.cells();
    StfField out(Z.grid);
    for (std::size_t c = 0; c < N; ++c) out.set(c, plastic_prox(pp, phi.v[c], Z.at(c), Z.ncomp, h));
    return out;
}

StressSolution solve_stress_step(const StressStepProblem& p, const StfField* guess) {
    if (!(p.h > 0.0)) throw std::invalid_argument("solve_stress_step: h must be > 0");
    if (p.gamma < 0.0) throw std::invalid_argument("solve_stress_step: gamma must be >= 0");
    const Grid& g = p.S_k.grid;
    const std::size_t n = p.S_k.v.size();
    const SpMat L = stress_operator_matrix(p.v_next, p.gamma);
    const StfField b = stress_rhs(p);
    const Eigen::Map<const Eigen::VectorXd> bv(b.v.data(), n);

    // |L|_2 <= sqrt(|L|_1 |L|_inf).
    double row = 0.0;
    std::vector<double> col(n, 0.0);
    for (Eigen::Index r = 0; r < L.rows(); ++r) {
        double s = 0.0;
        for (SpMat::InnerIterator it(L, r); it; ++it) {
            s += std::abs(it.value());
            col[it.col()] += std::abs(it.value());
        }
        row = std::max(row, s);
    }
    const double lnorm = std::sqrt(row * max_abs(col));
    StressSolution s;
    s.step = p.h * lnorm < 0.95 ? 1.0 : 1.0 / ((1.0 + p.h * lnorm) * (1.0 + p.h * lnorm));

    StfField S = guess ? *guess : p.S_k;
    StfField Y(g);
    Eigen::Map<Eigen::VectorXd> Sv(S.v.data(), n), Yv(Y.v.data(), n);
    for (s.iters = 1;; ++s.iters) {
        if (s.iters > p.max_iter)
            throw NonConvergence("solve_stress_step: forward-backward iteration did not converge (increment " +
                                 std::to_string(s.increment) + ")");
        Yv = Sv - s.step * (Sv + p.h * (L * Sv) - bv);
        StfField next = prox_field(Y, p.phi_k, p.params.plastic, s.step * p.h);
        double inc = 0.0, mag = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            inc = std::max(inc, std::abs(next.v[i] - S.v[i]));
            mag = std::max(mag, std::abs(next.v[i]));
        }
        std::copy(next.v.begin(), next.v.end(), S.v.begin());
        s.increment = inc;
        if (inc <= p.tol * std::max(1.0, mag)) break;
    }

    StfField Z(g);
    Eigen::Map<Eigen::VectorXd>(Z.v.data(), n) = bv - p.h * (L * Sv);
    s.S = prox_field(Z, p.phi_k, p.params.plastic, p.h);
    s.xi = StfField(g);
    for (std::size_t i = 0; i < n; ++i) s.xi.v[i] = (Z.v[i] - s.S.v[i]) / p.h;
    return s;
}

}  // namespace vep
