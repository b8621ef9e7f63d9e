#pragma once

#include "vep/flow_stress.hpp"

namespace vep {

struct EnergyBreakdown {
    double e_kin = 0.0;
    double e_el = 0.0;
    double e_pf = 0.0;
    double e_tot = 0.0;
    double w_integral = 0.0;
};

// sum_faces rho_f |v|^2/2 with rho_f the mean density of the adjacent cells.
double kinetic_energy(const VectorField& v, const ScalarField& rho);
// eps/2 |grad phi|^2 + W(phi)/eps; W is unshifted, so this part may be negative.
double phase_field_energy(const ScalarField& phi, const MaterialParams& p, double* w_integral = nullptr);
EnergyBreakdown energy_total(const State& s, const MaterialParams& p);

struct DissipationBreakdown {
    double d_s = 0.0;
    double d_ch = 0.0;
    double d_sd = 0.0;
    double d_plastic = 0.0;
    double d_tot = 0.0;
};

// Coefficients nu are evaluated at phi_coeff (the lagged phase field in the scheme).
DissipationBreakdown dissipation_total(const State& s, const StfField& xi, const ScalarField& phi_coeff,
                                       const MaterialParams& p);
double plastic_integral(const StfField& S, const ScalarField& phi, const PlasticParams& pp);

struct StepCertificate {
    double defect = 0.0;
    double tol = 0.0;
    double scale = 0.0;
    bool pass = false;
};

// defect = E(k+1) + h d_tot - E(k) - h f_work; tol = 10 tol_solver max(1, energy magnitudes).
StepCertificate certify_step(const EnergyBreakdown& before, const EnergyBreakdown& after,
                             const DissipationBreakdown& d, double h, double f_work, double tol_solver);

// Kinetic, stress and phase-field inequalities of one step. The transport pairing
// <mu, div(v phi_k)> (cross) and the elastic pairing <eta S, sym grad v> (coupling)
// enter two of them with opposite signs, so the three defects sum to the total.
struct PartialDefects {
    double kinetic = 0.0;
    double stress = 0.0;
    double phase_field = 0.0;
    double cross = 0.0;
    double coupling = 0.0;
    double sum() const { return kinetic + stress + phase_field; }
};
PartialDefects partial_defects(const State& k, const State& k1, const StfField& xi, const VectorField& f, double h,
                               const MaterialParams& p);

// Discrete sums that vanish identically in the energy estimate of the scheme.
struct CancellationSums {
    double flux_convection = 0.0;     // <K(J) v, v>
    double density_convection = 0.0;  // <K(rho_k v) v, v>
    double time_derivative = 0.0;     // <((rho'+rho)/2 v - rho v_k), v> minus its kinetic split
    double stress_transport = 0.0;    // <div(v S), S>
    double jaumann = 0.0;             // <S W - W S, S>
    double scale = 0.0;
};
CancellationSums cancellation_sums(const State& k, const State& k1, const MaterialParams& p);

struct BoundsAndMass {
    double mass = 0.0;  // sum phi vol
    double max_phi = 0.0;
    double max_S = 0.0;
    double max_trace = 0.0;  // of the reconstructed tensors
    double max_div = 0.0;
};
BoundsAndMass check_bounds_and_mass(const State& s);

}  // namespace vep
