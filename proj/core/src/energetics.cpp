#include "vep/energetics.hpp"

#include <algorithm>
#include <cmath>

namespace vep {

double kinetic_energy(const VectorField& v, const ScalarField& rho) {
    const Grid& g = v.grid;
    const VectorField rf = face_average(rho);
    double s = 0.0;
    for (int a = 0; a < g.dim; ++a)
        for_each_index(face_layout(g, a), [&](const std::array<int, 3>& m, std::size_t i) {
            s += face_weight(g, a, m) * 0.5 * rf.c[a][i] * v.c[a][i] * v.c[a][i];
        });
    return s;
}

double phase_field_energy(const ScalarField& phi, const MaterialParams& p, double* w_integral) {
    double w = 0.0;
    for (double x : phi.v) w += w_eval(x, p.lambda);
    w *= phi.grid.cell_volume();
    if (w_integral) *w_integral = w;
    return 0.5 * p.epsilon * gradient_energy(phi) + w / p.epsilon;
}

EnergyBreakdown energy_total(const State& s, const MaterialParams& p) {
    EnergyBreakdown e;
    e.e_kin = kinetic_energy(s.v, density_field(s.phi, p));
    e.e_el = 0.5 * inner_l2(s.S, s.S);
    e.e_pf = phase_field_energy(s.phi, p, &e.w_integral);
    e.e_tot = e.e_kin + e.e_el + e.e_pf;
    return e;
}

DissipationBreakdown dissipation_total(const State& s, const StfField& xi, const ScalarField& phi_coeff,
                                       const MaterialParams& p) {
    DissipationBreakdown d;
    d.d_s = viscous_dissipation(s.v, coefficient_field(phi_coeff, p.nu));
    d.d_ch = gradient_energy(s.mu);
    d.d_sd = p.gamma == 0.0 ? 0.0 : p.gamma * gradient_energy(s.S);
    d.d_plastic = inner_l2(xi, s.S);
    d.d_tot = d.d_s + d.d_ch + d.d_sd + d.d_plastic;
    return d;
}

double plastic_integral(const StfField& S, const ScalarField& phi, const PlasticParams& pp) {
    double s = 0.0;
    for (std::size_t c = 0; c < S.cells(); ++c) s += plastic_eval(pp, phi.v[c], S.at(c), S.ncomp);
    return s * S.grid.cell_volume();
}

StepCertificate certify_step(const EnergyBreakdown& before, const EnergyBreakdown& after,
                             const DissipationBreakdown& d, double h, double f_work, double tol_solver) {
    StepCertificate c;
    c.defect = after.e_tot + h * d.d_tot - before.e_tot - h * f_work;
    c.scale = std::max(1.0, std::abs(before.e_kin) + std::abs(before.e_el) + std::abs(before.e_pf) +
                                std::abs(after.e_kin) + std::abs(after.e_el) + std::abs(after.e_pf) +
                                h * std::abs(d.d_tot) + h * std::abs(f_work));
    c.tol = 10.0 * tol_solver * c.scale;
    c.pass = c.defect <= c.tol;
    return c;
}

PartialDefects partial_defects(const State& k, const State& k1, const StfField& xi, const VectorField& f, double h,
                               const MaterialParams& p) {
    PartialDefects r;
    const ScalarField eta = coefficient_field(k.phi, p.eta);
    StfField etaS = k1.S;
    const std::size_t N = etaS.cells();
    for (int i = 0; i < etaS.ncomp; ++i)
        for (std::size_t c = 0; c < N; ++c) etaS.v[i * N + c] *= eta.v[c];
    r.cross = inner_l2(k1.mu, advect_scalar(k1.v, k.phi));
    r.coupling = inner_l2(etaS, sym_grad(k1.v).dev);

    const double ek0 = kinetic_energy(k.v, density_field(k.phi, p));
    const double ek1 = kinetic_energy(k1.v, density_field(k1.phi, p));
    const double ds = viscous_dissipation(k1.v, coefficient_field(k.phi, p.nu));
    r.kinetic = ek1 - ek0 + h * ds - h * inner_l2(f, k1.v) - h * r.cross + h * r.coupling;

    const double dsd = p.gamma == 0.0 ? 0.0 : p.gamma * gradient_energy(k1.S);
    r.stress = 0.5 * inner_l2(k1.S, k1.S) - 0.5 * inner_l2(k.S, k.S) + h * (dsd + inner_l2(xi, k1.S)) - h * r.coupling;

    r.phase_field = phase_field_energy(k1.phi, p) - phase_field_energy(k.phi, p) + h * gradient_energy(k1.mu) +
                    h * r.cross;
    return r;
}

CancellationSums cancellation_sums(const State& k, const State& k1, const MaterialParams& p) {
    CancellationSums s;
    const Grid& g = k1.v.grid;
    const auto vf = flatten(k1.v);
    const Eigen::Map<const Eigen::VectorXd> v(vf.data(), vf.size());
    const std::vector<double> wts = [&] {
        std::vector<double> w(vf.size());
        const FaceIndexing fi(g);
        for (int a = 0; a < g.dim; ++a)
            for_each_index(fi.lay[a], [&](const std::array<int, 3>& m, std::size_t i) {
                w[fi.offset[a] + i] = face_weight(g, a, m);
            });
        return w;
    }();
    auto pair = [&](const SpMat& K) {
        const Eigen::VectorXd Kv = K * v;
        double q = 0.0;
        for (Eigen::Index i = 0; i < v.size(); ++i) q += wts[i] * Kv[i] * v[i];
        return q;
    };
    const VectorField J = relative_flux(k1.mu, p);
    const VectorField rho_k = face_average(density_field(k.phi, p));
    const VectorField rho_n = face_average(density_field(k1.phi, p));
    VectorField m(g);
    double tscale = 0.0;
    for (int a = 0; a < g.dim; ++a)
        for (std::size_t i = 0; i < m.c[a].size(); ++i) m.c[a][i] = rho_k.c[a][i] * k1.v.c[a][i];
    s.flux_convection = pair(skew_convection_matrix(J));
    s.density_convection = pair(skew_convection_matrix(m));

    for (int a = 0; a < g.dim; ++a)
        for_each_index(face_layout(g, a), [&](const std::array<int, 3>& mm, std::size_t i) {
            const double w = face_weight(g, a, mm);
            const double v1 = k1.v.c[a][i], v0 = k.v.c[a][i];
            const double r1 = rho_n.c[a][i], r0 = rho_k.c[a][i];
            const double lhs = (0.5 * (r1 + r0) * v1 - r0 * v0) * v1;
            const double rhs = 0.5 * r1 * v1 * v1 - 0.5 * r0 * v0 * v0 + 0.5 * r0 * (v1 - v0) * (v1 - v0);
            s.time_derivative += w * (lhs - rhs);
            tscale += w * (std::abs(lhs) + std::abs(rhs));
        });

    s.stress_transport = inner_l2(advect_tensor(k1.v, k1.S), k1.S);
    s.jaumann = inner_l2(jaumann_commutator(k1.S, skw_grad(k1.v)), k1.S);
    const double vs = norm_linf(k1.v) / g.spacing(0);
    s.scale = std::max({tscale, inner_l2(m, m) + inner_l2(J, J) + inner_l2(k1.v, k1.v),
                        vs * inner_l2(k1.S, k1.S)}) / std::min(1.0, g.spacing(0));
    return s;
}

BoundsAndMass check_bounds_and_mass(const State& s) {
    BoundsAndMass b;
    const Grid& g = s.phi.grid;
    double m = 0.0;
    for (double x : s.phi.v) {
        m += x;
        b.max_phi = std::max(b.max_phi, std::abs(x));
    }
    b.mass = m * g.cell_volume();
    b.max_S = norm_linf(s.S);
    for (std::size_t c = 0; c < s.S.cells(); ++c) {
        const auto coeff = s.S.at(c);
        const Mat3 M = stf_to_matrix(g.dim, coeff.data());
        double tr = 0.0;
        for (int a = 0; a < g.dim; ++a) tr += M[a][a];
        b.max_trace = std::max(b.max_trace, std::abs(tr));
    }
    b.max_div = norm_linf(divergence(s.v));
    return b;
}

}  // namespace vep
