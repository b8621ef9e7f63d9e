#include "vep/relative_energy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vep/stencil.hpp"

namespace vep {

namespace {

using Mat2 = std::array<std::array<double, 2>, 2>;

void require_unit_epsilon(const MaterialParams& p, const char* who) {
    if (p.epsilon != 1.0) throw std::invalid_argument(std::string(who) + ": requires epsilon = 1");
}

void require_grid(const Grid& a, const Grid& b, const char* who) {
    if (a != b) throw std::invalid_argument(std::string(who) + ": grid mismatch");
}

double slope(const PhaseCoefficient& c) { return 0.5 * (c.phase2 - c.phase1); }

Mat2 sym(const Mat2& d) {
    Mat2 e;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) e[i][j] = 0.5 * (d[i][j] + d[j][i]);
    return e;
}

double dot(const Mat2& a, const Mat2& b) {
    double s = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) s += a[i][j] * b[i][j];
    return s;
}

Mat2 from_stf(const StfField& T, std::size_t c) {
    const auto s = T.at(c);
    const Mat3 m = stf_to_matrix(2, s.data());
    return {{{m[0][0], m[0][1]}, {m[1][0], m[1][1]}}};
}

void to_stf(const Mat2& m2, StfField& T, std::size_t c) {
    Mat3 m{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m[i][j] = m2[i][j];
    std::array<double, 5> s{};
    matrix_to_stf(2, m, s.data());
    T.set(c, s);
}

// Cell-centered full symmetric gradient (deviatoric part plus trace) as a matrix.
std::vector<Mat2> cell_symgrad(const VectorField& w) {
    const SymGrad sg = sym_grad(w);
    std::vector<Mat2> out(w.grid.cell_count());
    for (std::size_t c = 0; c < out.size(); ++c) {
        Mat2 m = from_stf(sg.dev, c);
        m[0][0] += 0.5 * sg.trace.v[c];
        m[1][1] += 0.5 * sg.trace.v[c];
        out[c] = m;
    }
    return out;
}

double bregman_w(double phi, double phit, double lambda, double kappa) {
    return w_kappa_eval(phi, lambda, kappa) - w_kappa_eval(phit, lambda, kappa) -
           w_kappa_prime(phit, lambda, kappa) * (phi - phit);
}

}  // namespace

TripleSlice sample_triple(const TestTriple& tt, const Grid& g, double t) {
    TripleSlice ts;
    ts.grid = g;
    ts.time = t;
    ts.zero = tt.is_zero();
    ts.cells.resize(g.cell_count());
    for_each_index(cell_layout(g), [&](const std::array<int, 3>& m, std::size_t c) {
        ts.cells[c] = tt.eval(node_coord(g, 0, m[0], false), node_coord(g, 1, m[1], false), t);
    });
    for (int a = 0; a < 2; ++a) {
        const Layout F = face_layout(g, a);
        ts.faces[a].resize(F.size);
        for_each_index(F, [&](const std::array<int, 3>& m, std::size_t i) {
            ts.faces[a][i] = tt.eval(node_coord(g, 0, m[0], a == 0), node_coord(g, 1, m[1], a == 1), t);
        });
    }
    ts.v = triple_velocity(tt, g, t);
    ts.S = StfField(g);
    ts.phi = ScalarField(g);
    ts.mu = ScalarField(g);
    for (std::size_t c = 0; c < ts.cells.size(); ++c) {
        to_stf(ts.cells[c].S, ts.S, c);
        ts.phi.v[c] = ts.cells[c].phi;
        ts.mu.v[c] = ts.cells[c].mu;
    }
    ts.lap_mu = laplacian_neumann(ts.mu);
    return ts;
}

void RegWeightConfig::validate(const MaterialParams& p) const {
    if (!(korn_constant > 0.0)) throw std::invalid_argument("regularity weight: korn constant must be > 0");
    if (!(resolved_nu1(p) > 0.0)) throw std::invalid_argument("regularity weight: nu1 must be > 0");
    if (!(multiplier >= 0.0)) throw std::invalid_argument("regularity weight: multiplier must be >= 0");
}

double regularity_weight(const TripleSlice& ts, const MaterialParams& p, const RegWeightConfig& cfg) {
    cfg.validate(p);
    const double s = norm_linf(ts.S);
    const double k = cfg.korn_constant;
    return cfg.multiplier * k * k / cfg.resolved_nu1(p) * s * s;
}

namespace {

RelativeEnergy relative_energy_of(const State& s, const VectorField& v, const StfField& S, const ScalarField& phi,
                                  const MaterialParams& p) {
    RelativeEnergy r;
    r.kin = kinetic_energy(s.v - v, density_field(s.phi, p));
    r.el = 0.5 * inner_l2(s.S - S, s.S - S);
    const ScalarField d = s.phi - phi;
    double w = 0.0;
    for (std::size_t c = 0; c < d.size(); ++c) w += bregman_w(s.phi.v[c], phi.v[c], p.lambda, p.kappa);
    r.pf = 0.5 * gradient_energy(d) + w * phi.grid.cell_volume();
    r.total = r.kin + r.el + r.pf;
    return r;
}

}  // namespace

RelativeEnergy relative_energy(const State& s, const TripleSlice& ts, const MaterialParams& p) {
    require_unit_epsilon(p, "relative_energy");
    require_grid(s.phi.grid, ts.grid, "relative_energy");
    return relative_energy_of(s, ts.v, ts.S, ts.phi, p);
}

RelativeEnergy relative_energy(const State& s, const State& ref, const MaterialParams& p) {
    require_unit_epsilon(p, "relative_energy");
    require_grid(s.phi.grid, ref.phi.grid, "relative_energy");
    return relative_energy_of(s, ref.v, ref.S, ref.phi, p);
}

Trial relative_trial(const State& s, const TripleSlice& ts, const MaterialParams& p) {
    require_unit_epsilon(p, "relative_trial");
    require_grid(s.phi.grid, ts.grid, "relative_trial");
    const Grid& g = ts.grid;
    Trial tr;
    tr.Phi = s.v - ts.v;
    tr.Phi.enforce_no_slip();
    tr.Psi = s.S - ts.S;
    const ScalarField d = s.phi - ts.phi;
    const ScalarField lap = laplacian_neumann(d);
    VectorField prod(g);
    for (int a = 0; a < 2; ++a)
        for (std::size_t i = 0; i < prod.c[a].size(); ++i) prod.c[a][i] = tr.Phi.c[a][i] * ts.v.c[a][i];
    const auto pc = center_average(prod);
    const double drho = 0.5 * (p.rho2 - p.rho1);
    tr.zeta = ScalarField(g);
    for (std::size_t c = 0; c < d.size(); ++c) {
        const double wpp = w_second(ts.phi.v[c], p.lambda);
        tr.zeta.v[c] = -lap.v[c] + (wpp + p.kappa) * d.v[c] - drho * (pc[0].v[c] + pc[1].v[c]);
    }
    return tr;
}

SystemResidual system_residual(const TripleSlice& ts, double gamma, const MaterialParams& p, const VectorField* f) {
    require_unit_epsilon(p, "system_residual");
    const Grid& g = ts.grid;
    const double drho = 0.5 * (p.rho2 - p.rho1), dnu = slope(p.nu), deta = slope(p.eta);
    SystemResidual r{VectorField(g), StfField(g), ScalarField(g)};
    for (int a = 0; a < 2; ++a) {
        const Layout F = face_layout(g, a);
        for_each_index(F, [&](const std::array<int, 3>& m, std::size_t i) {
            if (m[a] == 0 || m[a] == g.n[a]) return;
            const TriplePoint& q = ts.faces[a][i];
            const double rho = density_of_phi(p, q.phi), nu = p.nu(q.phi), eta = p.eta(q.phi);
            const Mat2 E = sym(q.dv);
            double x = drho * q.phit * q.v[a] + rho * q.vt[a];
            double vgphi = 0.0;
            for (int j = 0; j < 2; ++j) vgphi += q.v[j] * q.gphi[j];
            x += drho * q.v[a] * vgphi;
            for (int j = 0; j < 2; ++j) {
                const double Jj = -drho * q.gmu[j];
                x += (rho * q.v[j] + Jj) * q.dv[a][j];
                x -= deta * q.gphi[j] * q.S[a][j] + eta * q.gS[j][a][j];
                x -= 2.0 * dnu * E[a][j] * q.gphi[j] + nu * q.ddv[a][j][j];
            }
            x += q.v[a] * (-drho * q.lap_mu);
            x -= q.mu * q.gphi[a];
            if (f) x -= f->c[a][i];
            r.momentum.c[a][i] = x;
        });
    }
    for (std::size_t c = 0; c < ts.cells.size(); ++c) {
        const TriplePoint& q = ts.cells[c];
        const double eta = p.eta(q.phi);
        const Mat2 E = sym(q.dv);
        Mat2 W;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) W[i][j] = 0.5 * (q.dv[i][j] - q.dv[j][i]);
        Mat2 M;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                double x = q.St[i][j] - gamma * q.lapS[i][j] - eta * E[i][j];
                for (int l = 0; l < 2; ++l) x += q.v[l] * q.gS[l][i][j] + q.S[i][l] * W[l][j] - W[i][l] * q.S[l][j];
                M[i][j] = x;
            }
        to_stf(M, r.stress, c);
        r.phase.v[c] = q.phit + q.v[0] * q.gphi[0] + q.v[1] * q.gphi[1] - ts.lap_mu.v[c];
    }
    return r;
}

OperatorPairing system_operator_apply(const SystemResidual& r, const Trial& trial) {
    OperatorPairing o;
    o.momentum = inner_l2(r.momentum, trial.Phi);
    o.stress = inner_l2(r.stress, trial.Psi);
    o.phase = inner_l2(r.phase, trial.zeta);
    o.total = o.momentum + o.stress + o.phase;
    return o;
}

RelativeDissipation relative_dissipation(const State& s, const TripleSlice& ts, double gamma, const MaterialParams& p,
                                         const RegWeightConfig& cfg) {
    require_unit_epsilon(p, "relative_dissipation");
    require_grid(s.phi.grid, ts.grid, "relative_dissipation");
    const Grid& g = ts.grid;
    const std::size_t N = g.cell_count();
    const double vol = g.cell_volume();
    const double drho = 0.5 * (p.rho2 - p.rho1);
    const double nu1 = cfg.resolved_nu1(p);

    RelativeDissipation out;
    out.weight = regularity_weight(ts, p, cfg);
    const double K = out.weight;

    VectorField w = s.v - ts.v;
    w.enforce_no_slip();
    const StfField dS = s.S - ts.S;
    const ScalarField dphi = s.phi - ts.phi;
    const ScalarField dmu = s.mu - ts.mu;
    const ScalarField rho = density_field(s.phi, p);

    out.d_sd = gamma * gradient_energy(dS);

    // Quadratic part.
    const double visc1 = viscous_dissipation(w, ScalarField(g, nu1));
    const double q_mu = 0.5 * gradient_energy(dmu) + 0.5 * gradient_energy(s.mu);
    const AntisymField Wc = skw_grad(w);
    double comm = 0.0;
    for (std::size_t c = 0; c < N; ++c) {
        const Mat2 D = from_stf(dS, c);
        const double w01 = Wc.v[c];
        const Mat2 W{{{0.0, w01}, {-w01, 0.0}}};
        Mat2 DW{};
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) DW[i][j] = D[i][0] * W[0][j] + D[i][1] * W[1][j];
        comm += dot(DW, ts.cells[c].S);
    }
    out.q_commutator = -2.0 * comm * vol;
    out.q_weight = K * (0.5 * inner_l2(dS, dS) + 0.5 * gradient_energy(dphi) + 0.5 * p.kappa * inner_l2(dphi, dphi));
    out.q = visc1 + q_mu + out.q_commutator + out.q_weight;

    // Remainder.
    double r = viscous_dissipation(w, coefficient_field(s.phi, p.nu)) - visc1;
    r -= 0.5 * gradient_energy(ts.mu);
    r += p.kappa * gradient_inner(dmu, dphi);

    const auto symw = cell_symgrad(w);
    const auto wc = center_average(w);
    const auto vc = center_average(s.v);
    const auto Jc = center_average(relative_flux(s.mu, p));
    const auto gdc = center_average(gradient(dphi));
    const ScalarField lapd = laplacian_neumann(dphi);
    double cell_sum = 0.0;
    for (std::size_t c = 0; c < N; ++c) {
        const TriplePoint& q = ts.cells[c];
        const Mat2 E = sym(q.dv);
        const double phi = s.phi.v[c], phit = q.phi;
        const double rhot = density_of_phi(p, phit);
        const std::array<double, 2> wv{wc[0].v[c], wc[1].v[c]};
        const std::array<double, 2> gd{gdc[0].v[c], gdc[1].v[c]};
        double x = 2.0 * (p.nu(phi) - p.nu(phit)) * dot(E, symw[c]);
        x += ts.lap_mu.v[c] * (-lapd.v[c] + w_second(phit, p.lambda) * dphi.v[c]);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                const double m = rho.v[c] * vc[j].v[c] - rhot * q.v[j] + Jc[j].v[c] + drho * q.gmu[j];
                x += wv[i] * m * q.dv[i][j];
                x += gd[i] * gd[j] * q.dv[i][j];
            }
        x += (rho.v[c] - rhot) * (wv[0] * q.vt[0] + wv[1] * q.vt[1]);
        const Mat2 D = from_stf(dS, c);
        const double deta = p.eta(phi) - p.eta(phit);
        x -= deta * (dot(D, E) + dot(q.S, symw[c]));
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) x -= D[i][j] * (wv[0] * q.gS[0][i][j] + wv[1] * q.gS[1][i][j]);
        x += p.kappa * (wv[0] * q.gphi[0] + wv[1] * q.gphi[1]) * dphi.v[c];
        x += K * (w_eval(phi, p.lambda) - w_eval(phit, p.lambda) - w_prime(phit, p.lambda) * dphi.v[c]);
        cell_sum += x;
    }
    r += cell_sum * vol;

    const VectorField gd = gradient(dphi);
    double face_sum = 0.0;
    for (int a = 0; a < 2; ++a)
        for_each_index(face_layout(g, a), [&](const std::array<int, 3>& m, std::size_t i) {
            face_sum += face_weight(g, a, m) * ts.faces[a][i].mu * gd.c[a][i] * w.c[a][i];
        });
    r -= face_sum;
    r += K * kinetic_energy(w, rho);

    out.r = r;
    out.total = out.d_sd + out.q + out.r;
    return out;
}

KornSums korn_sums(const VectorField& v) {
    const Grid& g = v.grid;
    const std::size_t N = g.cell_count();
    const double vol = g.cell_volume();
    const FaceIndexing fi(g);
    const EdgeIndexing ei(g);
    const auto flat = flatten(v);
    KornSums k;
    const ScalarField div = divergence(v);
    k.div_sq = inner_l2(div, div);
    for_each_index(cell_layout(g), [&](const std::array<int, 3>& m, std::size_t) {
        for (int a = 0; a < g.dim; ++a) {
            auto u = m;
            u[a] += 1;
            const double d = (flat[fi.offset[a] + fi.lay[a].at(u)] - flat[fi.offset[a] + fi.lay[a].at(m)]) / g.spacing(a);
            k.sym_sq += d * d * vol;
        }
    });
    for (int p = 0; p < g.pair_count(); ++p) {
        const int a = kPairs[p][0], b = kPairs[p][1];
        for_each_index(ei.lay[p], [&](const std::array<int, 3>& e, std::size_t) {
            double q = vol;
            if (e[a] == 0 || e[a] == g.n[a]) q *= 0.5;
            if (e[b] == 0 || e[b] == g.n[b]) q *= 0.5;
            double plus = 0.0, minus = 0.0;
            stencil::edge_shear(g, fi, v.tag, a, b, e, 1.0, 1.0, [&](std::size_t col, double c) { plus += c * flat[col]; });
            stencil::edge_shear(g, fi, v.tag, a, b, e, -1.0, 1.0,
                                [&](std::size_t col, double c) { minus += c * flat[col]; });
            k.sym_sq += 0.5 * plus * plus * q;
            k.skw_sq += 0.5 * minus * minus * q;
        });
    }
    k.grad_sq = k.sym_sq + k.skw_sq;
    const AntisymField W = skw_grad(v);
    for (int p = 0; p < W.npair; ++p)
        for (std::size_t c = 0; c < N; ++c) k.cell_skw_sq += 2.0 * W.v[p * N + c] * W.v[p * N + c] * vol;
    return k;
}

InequalityReport dissipative_inequality_check(const std::vector<State>& traj, const Forcing& forcing,
                                              const TestTriple& tt, double gamma, const MaterialParams& p,
                                              const RegWeightConfig& cfg, const InequalitySettings& settings) {
    require_unit_epsilon(p, "dissipative_inequality_check");
    cfg.validate(p);
    InequalityReport rep;
    if (traj.empty()) return rep;
    const Grid& g = traj.front().phi.grid;
    double hx = 0.0;
    for (int a = 0; a < g.dim; ++a) hx = std::max(hx, g.spacing(a));
    double hmax = 0.0;
    for (std::size_t k = 1; k < traj.size(); ++k) {
        const double h = traj[k].time - traj[k - 1].time;
        if (!(h > 0.0)) throw std::invalid_argument("dissipative_inequality_check: times must increase");
        hmax = std::max(hmax, h);
    }
    const double resolution = hmax + hx * hx;

    // Accumulated sums: A = sum_k h_k e^{-E_k} I_k and B = sum_k h_k e^{-E_k} |I_k|,
    // so that the weighted integrals at t_n are e^{E_n} A and e^{E_n} B.
    double E = 0.0, A = 0.0, B = 0.0, K_prev = 0.0, R0 = 0.0;
    for (std::size_t n = 0; n < traj.size(); ++n) {
        const State& s = traj[n];
        const TripleSlice ts = sample_triple(tt, g, s.time);
        const double K = regularity_weight(ts, p, cfg);
        const double R = relative_energy(s, ts, p).total;
        if (n == 0) {
            R0 = R;
        } else {
            const double h = s.time - traj[n - 1].time;
            E += 0.5 * h * (K_prev + K);
            VectorField f(g);
            if (forcing) {
                f = forcing(g, traj[n - 1].time, s.time);
                f.enforce_no_slip();
            }
            const auto res = system_residual(ts, gamma, p, &f);
            const double pair = system_operator_apply(res, relative_trial(s, ts, p)).total;
            const ScalarField& phi_lag = traj[n - 1].phi;
            const double plastic =
                plastic_integral(s.S, phi_lag, p.plastic) - plastic_integral(ts.S, phi_lag, p.plastic);
            const double I = pair + plastic + relative_dissipation(s, ts, gamma, p, cfg).total;
            A += h * std::exp(-E) * I;
            B += h * std::exp(-E) * std::abs(I);
        }
        K_prev = K;
        InequalityRow row;
        row.time = s.time;
        row.weight = K;
        row.lhs = R + std::exp(E) * A;
        row.rhs = R0 * std::exp(E);
        row.defect = row.lhs - row.rhs;
        const double scale = std::max(1.0, std::abs(R) + std::abs(row.rhs) + std::exp(E) * B);
        row.tol = settings.constant * resolution * scale;
        if (!std::isfinite(row.defect)) row.defect = INFINITY;
        if (row.defect > rep.max_defect) rep.max_defect = row.defect;
        const double ratio = row.defect / row.tol;
        if (ratio > rep.max_ratio) {
            rep.max_ratio = ratio;
            rep.worst_time = row.time;
        }
        if (!(row.defect <= row.tol)) rep.pass = false;
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace vep
