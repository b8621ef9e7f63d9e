#include "vep/oracles.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "vep/flow_stress.hpp"
#include "vep/random_fields.hpp"

namespace vep {

namespace {

constexpr double kPi = std::numbers::pi;

OracleCheck make_check(std::string name, double value, double limit, std::string detail = {}) {
    return {std::move(name), value, limit, value <= limit, std::move(detail)};
}

StfValue random_direction(std::mt19937_64& rng, int ncomp, double radius) {
    std::normal_distribution<double> N(0.0, 1.0);
    StfValue s{};
    double r = 0.0;
    while (r == 0.0) {
        for (int i = 0; i < ncomp; ++i) s[i] = N(rng);
        r = stf_norm(s, ncomp);
    }
    for (int i = 0; i < ncomp; ++i) s[i] *= radius / r;
    return s;
}

// argmin over t in [0, sigma] of (t - r)^2/2 + h (a t^2/2 + b t) by grid search:
// 1000 cells over the interval, then a grid of step `res` around the coarse minimizer.
double radial_grid_search(double r, double h, const PlasticEffective& e, double res) {
    auto f = [&](double t) { return 0.5 * (t - r) * (t - r) + h * (0.5 * e.a * t * t + e.b * t); };
    auto search = [&](double lo, double hi, long n) {
        double best = lo, fbest = f(lo);
        for (long i = 1; i <= n; ++i) {
            const double t = lo + (hi - lo) * double(i) / double(n);
            const double ft = f(t);
            if (ft < fbest) best = t, fbest = ft;
        }
        return best;
    };
    const long coarse = 1000;
    const double dt = e.sigma / coarse;
    const double t0 = search(0.0, e.sigma, coarse);
    const double lo = std::max(0.0, t0 - dt), hi = std::min(e.sigma, t0 + dt);
    return search(lo, hi, std::max(1L, long(std::ceil((hi - lo) / res))));
}

double dot(const StfValue& a, const StfValue& b, int ncomp) {
    double s = 0.0;
    for (int i = 0; i < ncomp; ++i) s += a[i] * b[i];
    return s;
}

double max_cell_error(const ScalarField& f, const std::function<double(double, double)>& exact, int margin) {
    const Grid& g = f.grid;
    double e = 0.0;
    for_each_index(cell_layout(g), [&](const std::array<int, 3>& m, std::size_t c) {
        for (int b = 0; b < g.dim; ++b)
            if (m[b] < margin || m[b] > g.n[b] - 1 - margin) return;
        e = std::max(e, std::abs(f.v[c] - exact(node_coord(g, 0, m[0], false), node_coord(g, 1, m[1], false))));
    });
    return e;
}

double max_face_error(const VectorField& u, const std::function<double(int, double, double)>& exact, int margin) {
    const Grid& g = u.grid;
    double e = 0.0;
    for (int a = 0; a < g.dim; ++a)
        for_each_index(face_layout(g, a), [&](const std::array<int, 3>& m, std::size_t i) {
            for (int b = 0; b < g.dim; ++b) {
                const int hi = b == a ? g.n[b] : g.n[b] - 1;
                if (m[b] < margin || m[b] > hi - margin) return;
            }
            const double x = node_coord(g, 0, m[0], a == 0), y = node_coord(g, 1, m[1], a == 1);
            e = std::max(e, std::abs(u.c[a][i] - exact(a, x, y)));
        });
    return e;
}

ScalarField sample_cells(const Grid& g, const std::function<double(double, double)>& f) {
    ScalarField out(g);
    for_each_index(cell_layout(g), [&](const std::array<int, 3>& m, std::size_t c) {
        out.v[c] = f(node_coord(g, 0, m[0], false), node_coord(g, 1, m[1], false));
    });
    return out;
}

VectorField sample_faces(const Grid& g, const std::function<double(int, double, double)>& f) {
    VectorField u(g, BoundaryTag::Extrapolate);
    for (int a = 0; a < g.dim; ++a)
        for_each_index(face_layout(g, a), [&](const std::array<int, 3>& m, std::size_t i) {
            u.c[a][i] = f(a, node_coord(g, 0, m[0], a == 0), node_coord(g, 1, m[1], a == 1));
        });
    return u;
}

std::vector<Grid> identity_grids() {
    return {Grid::square(16), Grid::make(2, {8, 20, 1}, {1, 3, 1}), Grid::make(3, {6, 5, 4}, {1, 1, 1})};
}

}  // namespace

std::vector<OracleCheck> prox_oracle_checks(const PlasticParams& p, const ProxOracleSettings& s) {
    std::mt19937_64 rng(s.seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double max_err = 0.0, max_slack = -INFINITY;
    long regime[3] = {0, 0, 0};  // zero, interior, on the ball
    for (int k = 0; k < s.samples; ++k) {
        const int ncomp = k % 2 == 0 ? 2 : 5;
        const double phi = 2.0 * U(rng) - 1.0;
        const double h = std::exp(std::log(0.01) + U(rng) * std::log(100.0));
        const auto e = plastic_effective(p, phi);
        // A third of the samples fall at or below the shrinkage threshold h b.
        const double rmax = 1.3 * (h * e.b + (1.0 + h * e.a) * e.sigma);
        const double r = k % 3 == 0 ? 1.1 * h * e.b * U(rng) : rmax * U(rng);
        const StfValue Z = random_direction(rng, ncomp, r);
        const StfValue S = plastic_prox(p, phi, Z, ncomp, h);

        const double t = radial_grid_search(r, h, e, s.resolution);
        double err = 0.0;
        for (int i = 0; i < ncomp; ++i) err = std::max(err, std::abs(S[i] - t * Z[i] / r));
        max_err = std::max(max_err, err);

        const double sn = stf_norm(S, ncomp);
        if (sn == 0.0)
            ++regime[0];
        else if (sn >= e.sigma * (1.0 - 1e-14))
            ++regime[2];
        else
            ++regime[1];

        // Subgradient inequality xi:(T - S) <= P(T) - P(S) over admissible T.
        const StfValue xi = plastic_subgradient_residual(S, Z, ncomp, h);
        const double PS = plastic_eval(p, phi, S, ncomp);
        for (int d = 0; d < s.directions; ++d) {
            const StfValue T = random_direction(rng, ncomp, e.sigma * U(rng));
            StfValue D{};
            for (int i = 0; i < ncomp; ++i) D[i] = T[i] - S[i];
            max_slack = std::max(max_slack, dot(xi, D, ncomp) - (plastic_eval(p, phi, T, ncomp) - PS));
        }
    }
    const long least = *std::min_element(regime, regime + 3);
    const std::string counts = "zero " + std::to_string(regime[0]) + ", interior " + std::to_string(regime[1]) +
                               ", on ball " + std::to_string(regime[2]);
    return {make_check("prox vs grid search (max abs)", max_err, 1e-6, counts),
            make_check("prox regime coverage (min share)", -double(least) / s.samples, -0.05, counts),
            make_check("subgradient inequality slack", max_slack, 1e-10,
                       std::to_string(s.samples) + " samples x " + std::to_string(s.directions) + " directions")};
}

std::vector<OracleCheck> operator_identity_checks(std::uint64_t seed, int trials) {
    std::mt19937_64 rng(seed);
    double grad_div = 0.0, sym_div = 0.0, adv_s = 0.0, adv_t = 0.0, jau = 0.0, lap = 0.0;
    for (const Grid& g : identity_grids()) {
        for (int t = 0; t < trials; ++t) {
            const ScalarField f = random_scalar(g, rng);
            const VectorField u = random_noslip(g, rng);
            const VectorField w = random_divfree(g, rng);
            const StfField S = random_stf(g, rng);

            const VectorField gf = gradient(f);
            const ScalarField du = divergence(u);
            grad_div = std::max(grad_div, std::abs(inner_l2(gf, u) + inner_l2(f, du)) /
                                              (norm_l2(gf) * norm_l2(u) + norm_l2(f) * norm_l2(du)));

            const VectorField dS = tensor_divergence(S);
            const StfField Du = sym_grad(u).dev;
            sym_div = std::max(sym_div, std::abs(inner_l2(dS, u) + inner_l2(S, Du)) /
                                            (norm_l2(dS) * norm_l2(u) + norm_l2(S) * norm_l2(Du)));

            const ScalarField A = advect_scalar(w, f);
            adv_s = std::max(adv_s, std::abs(inner_l2(A, f)) / (norm_l2(A) * norm_l2(f)));
            const StfField AS = advect_tensor(w, S);
            adv_t = std::max(adv_t, std::abs(inner_l2(AS, S)) / (norm_l2(AS) * norm_l2(S)));

            const AntisymField W = random_antisym(g, rng, 2.0);
            const StfField R = jaumann_commutator(S, W);
            const std::size_t N = g.cell_count();
            for (std::size_t c = 0; c < N; ++c) {
                const auto sc = S.at(c), rc = R.at(c);
                double rt = 0.0, tt = 0.0, wn = 0.0;
                for (int i = 0; i < S.ncomp; ++i) rt += rc[i] * sc[i], tt += sc[i] * sc[i];
                for (int q = 0; q < W.npair; ++q) wn += 2.0 * W.v[q * N + c] * W.v[q * N + c];
                if (tt > 0.0 && wn > 0.0) jau = std::max(jau, std::abs(rt) / (tt * std::sqrt(wn)));
            }

            const ScalarField L = laplacian_neumann(f);
            double sum = 0.0;
            for (double x : L.v) sum += x;
            lap = std::max(lap, std::abs(sum * g.cell_volume()) / (norm_linf(L) * g.volume()));
        }
    }
    const double lim = 1e-12;
    return {make_check("grad/div integration by parts", grad_div, lim),
            make_check("sym_grad/tensor_divergence integration by parts", sym_div, lim),
            make_check("scalar advection skew-symmetry", adv_s, lim),
            make_check("tensor advection skew-symmetry", adv_t, lim),
            make_check("Jaumann energy neutrality (pointwise)", jau, lim),
            make_check("Neumann Laplacian compatibility", lap, lim)};
}

std::vector<OracleCheck> operator_convergence_checks() {
    using ErrFn = std::function<double(const Grid&)>;
    const double r2 = 1.0 / std::sqrt(2.0);
    const std::vector<std::pair<std::string, ErrFn>> cases = {
        {"gradient of sin(pi x)",
         [](const Grid& g) {
             const auto f = sample_cells(g, [](double x, double) { return std::sin(kPi * x); });
             return max_face_error(gradient(f), [](int a, double x, double) { return a == 0 ? kPi * std::cos(kPi * x) : 0.0; },
                                   1);
         }},
        {"divergence of a smooth field",
         [](const Grid& g) {
             const auto u = sample_faces(g, [](int a, double x, double y) {
                 return a == 0 ? std::sin(kPi * x) * std::cos(2 * y) : std::cos(x + y);
             });
             return max_cell_error(
                 divergence(u), [](double x, double y) { return kPi * std::cos(kPi * x) * std::cos(2 * y) - std::sin(x + y); },
                 0);
         }},
        {"Neumann Laplacian of cos(pi x)",
         [](const Grid& g) {
             const auto f = sample_cells(g, [](double x, double) { return std::cos(kPi * x); });
             return max_cell_error(laplacian_neumann(f), [](double x, double) { return -kPi * kPi * std::cos(kPi * x); }, 0);
         }},
        {"sym_grad shear component",
         [](const Grid& g) {
             const auto u = sample_faces(g, [](int a, double x, double y) {
                 return a == 0 ? std::sin(kPi * x) * std::cos(2 * y) : std::cos(x + y);
             });
             const StfField D = sym_grad(u).dev;
             ScalarField off(g);
             for (std::size_t c = 0; c < g.cell_count(); ++c) off.v[c] = stf_to_matrix(2, D.at(c).data())[0][1];
             return max_cell_error(
                 off, [](double x, double y) { return 0.5 * (-2.0 * std::sin(kPi * x) * std::sin(2 * y) - std::sin(x + y)); },
                 2);
         }},
        {"tensor_divergence of a smooth tensor",
         [r2](const Grid& g) {
             StfField T(g);
             for_each_index(cell_layout(g), [&](const std::array<int, 3>& m, std::size_t c) {
                 const double x = node_coord(g, 0, m[0], false), y = node_coord(g, 1, m[1], false);
                 T.set(c, {std::sin(kPi * x) * std::cos(y), std::cos(x + 2 * y)});
             });
             // T = c1 diag(1,-1)/sqrt2 + c2 offdiag(1,1)/sqrt2.
             return max_face_error(
                 tensor_divergence(T),
                 [r2](int a, double x, double y) {
                     const double c1x = kPi * std::cos(kPi * x) * std::cos(y), c1y = -std::sin(kPi * x) * std::sin(y);
                     const double c2x = -std::sin(x + 2 * y), c2y = -2.0 * std::sin(x + 2 * y);
                     return a == 0 ? r2 * (c1x + c2y) : r2 * (c2x - c1y);
                 },
                 2);
         }},
        {"scalar advection by a solenoidal field",
         [](const Grid& g) {
             const auto u = sample_faces(g, [](int a, double x, double y) {
                 return a == 0 ? std::sin(kPi * x) * std::cos(kPi * y) : -std::cos(kPi * x) * std::sin(kPi * y);
             });
             const auto f = sample_cells(g, [](double x, double y) { return std::sin(x) * std::cos(2 * y); });
             return max_cell_error(
                 advect_scalar(u, f),
                 [](double x, double y) {
                     return std::sin(kPi * x) * std::cos(kPi * y) * std::cos(x) * std::cos(2 * y) +
                            2.0 * std::cos(kPi * x) * std::sin(kPi * y) * std::sin(x) * std::sin(2 * y);
                 },
                 1);
         }},
    };
    std::vector<OracleCheck> out;
    for (const auto& [name, err] : cases) {
        const double e32 = err(Grid::square(32)), e64 = err(Grid::square(64));
        const double ratio = e32 / e64;
        OracleCheck c = make_check("Richardson ratio: " + name, std::abs(ratio - 4.0), 0.8);
        c.detail = "ratio " + std::to_string(ratio) + " (errors " + std::to_string(e32) + ", " + std::to_string(e64) + ")";
        out.push_back(c);
    }
    return out;
}

OracleCheck stress_bruteforce_check(std::uint64_t seed, double gamma) {
    const Grid g = Grid::square(8, 2.0);
    std::mt19937_64 rng(seed);
    MaterialParams m;
    m.plastic = {1.0, 2.0, 0.01, 0.02, 0.3, 0.25};
    StressStepProblem p;
    p.S_k = random_stf(g, rng, 0.4);
    p.v_next = random_divfree(g, rng, 2.0);
    p.phi_k = random_scalar(g, rng, 0.99);
    p.h = 0.1;
    p.gamma = gamma;
    p.params = m;
    p.tol = 1e-14;
    const StressSolution sol = solve_stress_step(p);

    const std::size_t n = p.S_k.v.size(), N = g.cell_count();
    const Eigen::MatrixXd M =
        Eigen::MatrixXd::Identity(n, n) + p.h * Eigen::MatrixXd(stress_operator_matrix(p.v_next, p.gamma));
    const StfField b = stress_rhs(p);
    const Eigen::Map<const Eigen::VectorXd> bv(b.v.data(), n);
    const double smax = Eigen::JacobiSVD<Eigen::MatrixXd>(M).singularValues()[0];
    const double tau = 1.0 / (smax * smax);
    // Projected gradient on the monolithic inclusion 0 in M S - b + h dP(S).
    Eigen::VectorXd S = Eigen::VectorXd::Zero(n);
    for (int it = 0; it < 200000; ++it) {
        const Eigen::VectorXd Y = S - tau * (M * S - bv);
        Eigen::VectorXd next(n);
        for (std::size_t c = 0; c < N; ++c) {
            const StfValue z{Y[c], Y[N + c]};
            const auto r = plastic_prox(m.plastic, p.phi_k.v[c], z, 2, tau * p.h);
            next[c] = r[0], next[N + c] = r[1];
        }
        const double inc = (next - S).lpNorm<Eigen::Infinity>();
        S = next;
        if (inc < 1e-16) break;
    }
    double diff = 0.0;
    for (std::size_t i = 0; i < n; ++i) diff = std::max(diff, std::abs(sol.S.v[i] - S[i]));
    int on_ball = 0;
    for (std::size_t c = 0; c < N; ++c)
        if (stf_norm(sol.S.at(c), 2) >= plastic_effective(m.plastic, p.phi_k.v[c]).sigma * (1 - 1e-12)) ++on_ball;
    OracleCheck c = make_check("stress step vs dense projected gradient (8x8)", diff, 1e-7,
                               std::to_string(on_ball) + " cells on the yield ball");
    if (on_ball == 0) c.pass = false;
    return c;
}

}  // namespace vep
