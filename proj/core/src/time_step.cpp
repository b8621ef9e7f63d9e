#include "vep/time_step.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace vep {

namespace {

double rel_change(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0, m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d = std::max(d, std::abs(a[i] - b[i]));
        m = std::max(m, std::abs(a[i]));
    }
    return d / (1.0 + m);
}

VectorField forcing_field(const Forcing& f, const Grid& g, double t0, double t1) {
    if (!f) return VectorField(g);
    VectorField out = f(g, t0, t1);
    out.enforce_no_slip();
    return out;
}

}  // namespace

StepResult picard_attempt(const State& k, double h, const MaterialParams& params, const Forcing& forcing,
                          const StepOptions& opt) {
    const Grid& g = k.phi.grid;
    const VectorField f = forcing_field(forcing, g, k.time, k.time + h);
    const ScalarField rho_k = density_field(k.phi, params);

    ScalarField phi = k.phi, mu = k.mu;
    VectorField v = k.v;
    StfField S = k.S, xi(g);
    ScalarField pressure = k.p;
    StepReport rep;
    bool converged = false;
    for (int m = 1; m <= opt.max_outer; ++m) {
        ChStepProblem cp{k.phi, v, h, params, opt.tol_lin};
        ChStepSolution ch = solve_ch_step(cp, &phi, &mu);
        rep.newton_iters += ch.newton_iters;

        MomentumStepProblem mp;
        mp.rho_k = rho_k;
        mp.rho_next = density_field(ch.phi_next, params);
        mp.phi_k = k.phi;
        mp.mu_next = ch.mu_next;
        mp.v_k = k.v;
        mp.v_conv = v;
        mp.J_next = relative_flux(ch.mu_next, params);
        mp.f = f;
        mp.S = S;
        mp.h = h;
        mp.params = params;
        MomentumSolution mom = solve_momentum_step(mp);

        StressStepProblem sp{k.S, mom.v, k.phi, h, params.gamma, params, opt.tol_lin};
        StressSolution st = solve_stress_step(sp, &S);
        rep.stress_iters += st.iters;

        const double dx = std::max({rel_change(ch.phi_next.v, phi.v), rel_change(ch.mu_next.v, mu.v),
                                    rel_change(flatten(mom.v), flatten(v)), rel_change(st.S.v, S.v)});
        phi = std::move(ch.phi_next);
        mu = std::move(ch.mu_next);
        v = std::move(mom.v);
        S = std::move(st.S);
        xi = std::move(st.xi);
        pressure = std::move(mom.pressure);
        rep.outer_iters = m;
        if (dx <= opt.tol_outer) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw NonConvergence("picard_time_step: outer iteration did not converge in " +
                             std::to_string(opt.max_outer) + " iterations");

    StepResult r;
    r.state.v = std::move(v);
    r.state.S = std::move(S);
    r.state.phi = std::move(phi);
    r.state.mu = std::move(mu);
    r.state.p = std::move(pressure);
    r.state.time = k.time + h;
    r.state.step = k.step + 1;
    r.xi = std::move(xi);

    rep.step = r.state.step;
    rep.time = r.state.time;
    rep.h = h;
    const EnergyBreakdown e0 = energy_total(k, params);
    rep.energy = energy_total(r.state, params);
    rep.dissipation = dissipation_total(r.state, r.xi, k.phi, params);
    rep.f_work = inner_l2(f, r.state.v);
    rep.certificate = certify_step(e0, rep.energy, rep.dissipation, h, rep.f_work, opt.tol_outer + opt.tol_lin);
    rep.partial = partial_defects(k, r.state, r.xi, f, h, params);
    const BoundsAndMass bm = check_bounds_and_mass(r.state);
    rep.mass = bm.mass;
    rep.max_phi = bm.max_phi;
    rep.max_S = bm.max_S;
    rep.max_trace = bm.max_trace;
    rep.max_div = bm.max_div;
    rep.plastic_integral = plastic_integral(r.state.S, k.phi, params.plastic);
    rep.ch_ratio = ch_diagnostics(r.state.phi, r.state.mu, k.phi, params).ratio;
    r.report = rep;
    return r;
}

namespace {

StepResult attempt_or_split(const State& k, double h, const MaterialParams& params, const Forcing& forcing,
                            const StepOptions& opt, int depth) {
    try {
        return picard_attempt(k, h, params, forcing, opt);
    } catch (const NonConvergence&) {
        if (depth >= opt.max_halvings) throw;
    } catch (const DomainViolation&) {
        if (depth >= opt.max_halvings) throw;
    } catch (const DomainError&) {
        if (depth >= opt.max_halvings) throw;
    }
    StepResult a = attempt_or_split(k, 0.5 * h, params, forcing, opt, depth + 1);
    StepResult b = attempt_or_split(a.state, 0.5 * h, params, forcing, opt, depth + 1);
    const StepReport &ra = a.report, &rb = b.report;
    StepReport& r = b.report;
    auto avg = [](double x, double y) { return 0.5 * (x + y); };
    r.dissipation.d_s = avg(ra.dissipation.d_s, rb.dissipation.d_s);
    r.dissipation.d_ch = avg(ra.dissipation.d_ch, rb.dissipation.d_ch);
    r.dissipation.d_sd = avg(ra.dissipation.d_sd, rb.dissipation.d_sd);
    r.dissipation.d_plastic = avg(ra.dissipation.d_plastic, rb.dissipation.d_plastic);
    r.dissipation.d_tot = avg(ra.dissipation.d_tot, rb.dissipation.d_tot);
    r.f_work = avg(ra.f_work, rb.f_work);
    r.certificate.defect = ra.certificate.defect + rb.certificate.defect;
    r.certificate.tol = ra.certificate.tol + rb.certificate.tol;
    r.certificate.scale = std::max(ra.certificate.scale, rb.certificate.scale);
    r.certificate.pass = ra.certificate.pass && rb.certificate.pass;
    r.partial.kinetic += ra.partial.kinetic;
    r.partial.stress += ra.partial.stress;
    r.partial.phase_field += ra.partial.phase_field;
    r.partial.cross = avg(ra.partial.cross, rb.partial.cross);
    r.partial.coupling = avg(ra.partial.coupling, rb.partial.coupling);
    r.max_phi = std::max(ra.max_phi, rb.max_phi);
    r.max_S = std::max(ra.max_S, rb.max_S);
    r.max_trace = std::max(ra.max_trace, rb.max_trace);
    r.max_div = std::max(ra.max_div, rb.max_div);
    r.ch_ratio = std::max(ra.ch_ratio, rb.ch_ratio);
    r.outer_iters += ra.outer_iters;
    r.newton_iters += ra.newton_iters;
    r.stress_iters += ra.stress_iters;
    r.substeps += ra.substeps;
    r.step = k.step + 1;
    r.h = h;
    b.state.step = k.step + 1;
    return b;
}

}  // namespace

StepResult picard_time_step(const State& k, double h, const MaterialParams& params, const Forcing& forcing,
                            const StepOptions& opt) {
    return attempt_or_split(k, h, params, forcing, opt, 0);
}

}  // namespace vep
