#pragma once

#include <utility>

#include "vep/fields.hpp"
#include "vep/materials.hpp"
#include "vep/operators.hpp"

namespace vep {

// Margin kept between |phi| and 1 by the damped Newton iteration.
inline constexpr double kInteriorDelta = 1e-9;

struct ChStepProblem {
    ScalarField phi_k;
    VectorField v;
    double h = 0.0;
    MaterialParams params;
    double tol = 1e-10;
    int max_iter = 50;
};

struct ChStepSolution {
    ScalarField phi_next;
    ScalarField mu_next;
    int newton_iters = 0;
    double residual_norm = 0.0;
};

// R1 = (phi - phi_k)/h + div(v phi_k) - lap mu
// R2 = mu + eps lap phi - (W_kappa'(phi) - kappa (phi + phi_k)/2) / eps
// Throws DomainError if |phi| >= 1 somewhere.
std::pair<ScalarField, ScalarField> ch_residual(const ChStepProblem& p, const ScalarField& phi, const ScalarField& mu);

// Jacobian of (R1, R2) with respect to (phi, mu), unknowns ordered [phi; mu].
SpMat ch_jacobian(const ChStepProblem& p, const ScalarField& phi);

// max(h |R1|_inf, |R2|_inf): both parts in units of phi and mu.
double ch_residual_norm(const ChStepProblem& p, const ScalarField& phi, const ScalarField& mu);

// Damped Newton from the given guess (phi_k and W_kappa'(phi_k)-based mu when omitted).
// Throws NonConvergence or DomainViolation.
ChStepSolution solve_ch_step(const ChStepProblem& p, const ScalarField* phi_guess = nullptr,
                             const ScalarField* mu_guess = nullptr);

// Both sides of the chemical-potential estimate
//   |W_kappa'(phi)|_2 + |int mu| <= C (|grad mu|_2 + |grad phi|_2^2 + |grad phi_k|_2^2 + 1);
// only the ratio's boundedness along a run is meaningful.
struct ChDiagnostics {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
};
ChDiagnostics ch_diagnostics(const ScalarField& phi_next, const ScalarField& mu_next, const ScalarField& phi_k,
                             const MaterialParams& params);

}  // namespace vep
