#include "vep/ch_solver.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace vep {

namespace {

void check_problem(const ChStepProblem& p) {
    if (!(p.h > 0.0)) throw std::invalid_argument("solve_ch_step: h must be > 0");
    if (p.phi_k.grid != p.v.grid) throw std::invalid_argument("solve_ch_step: grid mismatch");
}

double max_abs(const std::vector<double>& x) {
    double m = 0.0;
    for (double a : x) m = std::max(m, std::abs(a));
    return m;
}

}  // namespace

std::pair<ScalarField, ScalarField> ch_residual(const ChStepProblem& p, const ScalarField& phi, const ScalarField& mu) {
    check_problem(p);
    const auto& m = p.params;
    const ScalarField adv = advect_scalar(p.v, p.phi_k);
    const ScalarField lmu = laplacian_neumann(mu);
    const ScalarField lphi = laplacian_neumann(phi);
    ScalarField r1(phi.grid), r2(phi.grid);
    for (std::size_t c = 0; c < phi.size(); ++c) {
        r1.v[c] = (phi.v[c] - p.phi_k.v[c]) / p.h + adv.v[c] - lmu.v[c];
        const double wk = w_kappa_prime(phi.v[c], m.lambda, m.kappa);
        r2.v[c] = mu.v[c] + m.epsilon * lphi.v[c] - (wk - 0.5 * m.kappa * (phi.v[c] + p.phi_k.v[c])) / m.epsilon;
    }
    return {std::move(r1), std::move(r2)};
}

SpMat ch_jacobian(const ChStepProblem& p, const ScalarField& phi) {
    const auto& m = p.params;
    const Grid& g = phi.grid;
    const Eigen::Index N = static_cast<Eigen::Index>(g.cell_count());
    const SpMat L = laplacian_matrix(g);
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(4 * L.nonZeros() + 4 * N);
    for (Eigen::Index r = 0; r < N; ++r) {
        for (SpMat::InnerIterator it(L, r); it; ++it) {
            t.emplace_back(r, N + it.col(), -it.value());
            t.emplace_back(N + r, it.col(), m.epsilon * it.value());
        }
        t.emplace_back(r, r, 1.0 / p.h);
        const double d = (w_kappa_second(phi.v[r], m.lambda, m.kappa) - 0.5 * m.kappa) / m.epsilon;
        t.emplace_back(N + r, r, -d);
        t.emplace_back(N + r, N + r, 1.0);
    }
    SpMat J(2 * N, 2 * N);
    J.setFromTriplets(t.begin(), t.end());
    return J;
}

double ch_residual_norm(const ChStepProblem& p, const ScalarField& phi, const ScalarField& mu) {
    auto [r1, r2] = ch_residual(p, phi, mu);
    return std::max(p.h * max_abs(r1.v), max_abs(r2.v));
}

ChStepSolution solve_ch_step(const ChStepProblem& p, const ScalarField* phi_guess, const ScalarField* mu_guess) {
    check_problem(p);
    const auto& m = p.params;
    const Grid& g = p.phi_k.grid;
    const std::size_t N = g.cell_count();
    const double bound = 1.0 - kInteriorDelta;
    if (max_abs(p.phi_k.v) > bound)
        throw DomainViolation("solve_ch_step: |phi_k| exceeds 1 - delta_int");

    ScalarField phi = phi_guess ? *phi_guess : p.phi_k;
    if (max_abs(phi.v) > bound) phi = p.phi_k;
    ScalarField mu(g);
    if (mu_guess) {
        mu = *mu_guess;
    } else {
        const ScalarField lphi = laplacian_neumann(phi);
        for (std::size_t c = 0; c < N; ++c)
            mu.v[c] = -m.epsilon * lphi.v[c] +
                      (w_kappa_prime(phi.v[c], m.lambda, m.kappa) - 0.5 * m.kappa * (phi.v[c] + p.phi_k.v[c])) /
                          m.epsilon;
    }

    auto merit = [&](const ScalarField& f, const ScalarField& q, double& inf) {
        auto [r1, r2] = ch_residual(p, f, q);
        double s = 0.0;
        inf = 0.0;
        for (std::size_t c = 0; c < N; ++c) {
            const double a = p.h * r1.v[c], b = r2.v[c];
            s += a * a + b * b;
            inf = std::max({inf, std::abs(a), std::abs(b)});
        }
        return std::sqrt(s);
    };

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    bool analyzed = false;
    double inf = 0.0;
    double cur = merit(phi, mu, inf);
    int it = 0;
    while (inf > p.tol) {
        if (it >= p.max_iter)
            throw NonConvergence("solve_ch_step: Newton did not converge in " + std::to_string(p.max_iter) +
                                 " iterations (residual " + std::to_string(inf) + ")");
        ++it;
        auto [r1, r2] = ch_residual(p, phi, mu);
        Eigen::VectorXd rhs(2 * N);
        for (std::size_t c = 0; c < N; ++c) {
            rhs[c] = -r1.v[c];
            rhs[N + c] = -r2.v[c];
        }
        Eigen::SparseMatrix<double> J = ch_jacobian(p, phi);
        if (!analyzed) {
            lu.analyzePattern(J);
            analyzed = true;
        }
        lu.factorize(J);
        if (lu.info() != Eigen::Success) throw LinearSolveFailure("solve_ch_step: Jacobian factorization failed");
        const Eigen::VectorXd d = lu.solve(rhs);

        double theta = 1.0;
        bool accepted = false;
        ScalarField tphi(g), tmu(g);
        for (int halving = 0; halving <= 40; ++halving, theta *= 0.5) {
            bool inside = true;
            for (std::size_t c = 0; c < N; ++c) {
                tphi.v[c] = phi.v[c] + theta * d[c];
                tmu.v[c] = mu.v[c] + theta * d[N + c];
                if (!(std::abs(tphi.v[c]) <= bound)) inside = false;
            }
            if (!inside) continue;
            double tinf = 0.0;
            const double trial = merit(tphi, tmu, tinf);
            if (trial <= (1.0 - 1e-4 * theta) * cur || tinf <= p.tol) {
                phi = tphi;
                mu = tmu;
                cur = trial;
                inf = tinf;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            bool inside_any = false;
            for (std::size_t c = 0; c < N; ++c)
                if (std::abs(phi.v[c] + theta * d[c]) <= bound) inside_any = true;
            if (!inside_any)
                throw DomainViolation("solve_ch_step: damping could not keep |phi| <= 1 - delta_int");
            throw NonConvergence("solve_ch_step: line search failed after 40 halvings");
        }
    }

    // Take phi from the discrete transport equation itself so the mass balance
    // holds to round-off rather than to the Newton tolerance.
    const ScalarField adv = advect_scalar(p.v, p.phi_k);
    const ScalarField lmu = laplacian_neumann(mu);
    for (std::size_t c = 0; c < N; ++c) phi.v[c] = p.phi_k.v[c] + p.h * (lmu.v[c] - adv.v[c]);
    if (max_abs(phi.v) > bound) throw DomainViolation("solve_ch_step: converged phi violates the interior bound");

    ChStepSolution s;
    s.phi_next = std::move(phi);
    s.mu_next = std::move(mu);
    s.newton_iters = it;
    s.residual_norm = ch_residual_norm(p, s.phi_next, s.mu_next);
    return s;
}

ChDiagnostics ch_diagnostics(const ScalarField& phi_next, const ScalarField& mu_next, const ScalarField& phi_k,
                             const MaterialParams& params) {
    const Grid& g = phi_next.grid;
    ScalarField wk(g);
    double mint = 0.0;
    for (std::size_t c = 0; c < phi_next.size(); ++c) {
        wk.v[c] = w_kappa_prime(phi_next.v[c], params.lambda, params.kappa);
        mint += mu_next.v[c];
    }
    ChDiagnostics d;
    d.lhs = norm_l2(wk) + std::abs(mint * g.cell_volume());
    d.rhs = std::sqrt(gradient_energy(mu_next)) + gradient_energy(phi_next) + gradient_energy(phi_k) + 1.0;
    d.ratio = d.lhs / d.rhs;
    return d;
}

}  // namespace vep
