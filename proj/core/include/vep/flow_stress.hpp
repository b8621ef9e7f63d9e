#pragma once

#include "vep/fields.hpp"
#include "vep/materials.hpp"
#include "vep/operators.hpp"

namespace vep {

// One time level. p is the pressure multiplier of the momentum solve.
struct State {
    VectorField v;
    StfField S;
    ScalarField phi;
    ScalarField mu;
    ScalarField p;
    double time = 0.0;
    int step = 0;

    static State zero(const Grid& g);
};

ScalarField density_field(const ScalarField& phi, const MaterialParams& params);
ScalarField coefficient_field(const ScalarField& phi, const PhaseCoefficient& c);

// J = -(rho2 - rho1)/2 grad mu on faces (zero on the boundary).
VectorField relative_flux(const ScalarField& mu, const MaterialParams& params);

// Viscous form: normal strain at cells weighted by 2 nu_c, engineering shear at
// edges weighted by the mean viscosity of the adjacent cells and the trapezoid
// edge volume w_e (halved per wall the edge lies on).
// viscous_dissipation(v) = sum 2 nu (d_a v_a)^2 vol + sum nu_e (d_b v_a + d_a v_b)^2 w_e
double viscous_dissipation(const VectorField& v, const ScalarField& nu);
// Face operator V with <V v, v> = viscous_dissipation(v) for no-slip v.
SpMat viscous_matrix(const Grid& g, const ScalarField& nu);

struct MomentumStepProblem {
    ScalarField rho_k;
    ScalarField rho_next;
    ScalarField phi_k;
    ScalarField mu_next;
    VectorField v_k;
    VectorField v_conv;  // Picard iterate transporting the momentum
    VectorField J_next;
    VectorField f;  // time-averaged forcing over the step
    StfField S;
    double h = 0.0;
    MaterialParams params;
};

struct MomentumSolution {
    VectorField v;
    ScalarField pressure;  // zero mean
    double div_residual = 0.0;
};

// Saddle-point solve of
//   ((rho_next + rho_k)/2 v - rho_k v_k)/h + K(rho_k v_conv + J) v - div(2 nu(phi_k) sym grad v) + grad p
//     = -phi_k grad mu_next + f + div(eta(phi_k) S),   div v = 0,
// with K the skew-symmetric convection operator and the phase forcing in the
// discrete form adjoint to the cell transport of phi_k.
MomentumSolution solve_momentum_step(const MomentumStepProblem& p);

struct StressStepProblem {
    StfField S_k;
    VectorField v_next;
    ScalarField phi_k;
    double h = 0.0;
    double gamma = 0.0;
    MaterialParams params;
    double tol = 1e-13;
    int max_iter = 20000;
};

struct StressSolution {
    StfField S;
    StfField xi;
    int iters = 0;
    double step = 1.0;       // forward-backward step tau
    double increment = 0.0;  // last |S^(j+1) - S^(j)|_inf
};

// Linear part L of the stress law for fixed v: transport + Jaumann commutator - gamma lap,
// acting on the component-major STF coefficient vector.
SpMat stress_operator_matrix(const VectorField& v, double gamma);
// b = S_k + h eta(phi_k) sym grad v (trace-free part).
StfField stress_rhs(const StressStepProblem& p);
// Forward-backward splitting S <- prox_{tau h P}(S - tau((I + hL)S - b)); tau = 1
// when h|L| < 1, otherwise tau = 1/|I + hL|^2 from a norm bound. Throws NonConvergence.
StressSolution solve_stress_step(const StressStepProblem& p, const StfField* guess = nullptr);

// Pointwise prox of a whole field and the subgradient recovery.
StfField prox_field(const StfField& Z, const ScalarField& phi, const PlasticParams& pp, double h);

}  // namespace vep
