#pragma once

#include <cmath>
#include <vector>

#include "vep/test_triple.hpp"
#include "vep/time_step.hpp"

namespace vep {

// Everything the relative-energy formulas need from a test triple at one time:
// pointwise data at cell centers and at face centers, and grid samples.
struct TripleSlice {
    Grid grid;
    double time = 0.0;
    bool zero = true;
    std::vector<TriplePoint> cells;
    std::array<std::vector<TriplePoint>, 2> faces;
    VectorField v;  // discrete curl of the nodal stream function
    StfField S;
    ScalarField phi;
    ScalarField mu;
    ScalarField lap_mu;  // discrete Neumann Laplacian of the sampled mu~
};
TripleSlice sample_triple(const TestTriple& tt, const Grid& g, double t);

// Weight K(S~) = multiplier * k^2/nu1 * max |S~|^2 over cell centers. nu1 <= 0 means
// the lower viscosity bound of the material.
struct RegWeightConfig {
    double korn_constant = std::sqrt(2.0);
    double nu1 = 0.0;
    double multiplier = 1.0;
    double resolved_nu1(const MaterialParams& p) const { return nu1 > 0.0 ? nu1 : p.nu.lower(); }
    void validate(const MaterialParams& p) const;
};
double regularity_weight(const TripleSlice& ts, const MaterialParams& p, const RegWeightConfig& cfg);

struct RelativeEnergy {
    double kin = 0.0;
    double el = 0.0;
    double pf = 0.0;  // gradient part plus the W_kappa gap
    double total = 0.0;
};
// Requires epsilon = 1.
RelativeEnergy relative_energy(const State& s, const TripleSlice& ts, const MaterialParams& p);
// Same functional with a second discrete state in place of the triple.
RelativeEnergy relative_energy(const State& s, const State& ref, const MaterialParams& p);

// Second argument of the system operator built from a numerical state:
// (v - v~, S - S~, -lap(phi - phi~) + W''(phi~)(phi - phi~) + kappa (phi - phi~)
//  - (rho2 - rho1)/2 (v - v~).v~).
struct Trial {
    VectorField Phi;
    StfField Psi;
    ScalarField zeta;
};
Trial relative_trial(const State& s, const TripleSlice& ts, const MaterialParams& p);

// Strong-form residuals of the three equations evaluated on the triple: momentum at
// face centers, stress and phase at cell centers. f is the step-averaged load (may be null).
struct SystemResidual {
    VectorField momentum;
    StfField stress;
    ScalarField phase;
};
SystemResidual system_residual(const TripleSlice& ts, double gamma, const MaterialParams& p,
                               const VectorField* f = nullptr);

struct OperatorPairing {
    double momentum = 0.0;
    double stress = 0.0;
    double phase = 0.0;
    double total = 0.0;
};
OperatorPairing system_operator_apply(const SystemResidual& r, const Trial& trial);

// W_gamma = D_sd,gamma(S - S~) + Q + R, with Q the quadratic part (its nonnegativity
// rests on the Korn and Young bounds) and R the remainder.
struct RelativeDissipation {
    double d_sd = 0.0;
    double q = 0.0;
    double q_commutator = 0.0;  // -2 <(S - S~) skw grad(v - v~), S~>
    double q_weight = 0.0;      // K times the quadratic energy gaps
    double r = 0.0;
    double total = 0.0;
    double weight = 0.0;  // K used
};
RelativeDissipation relative_dissipation(const State& s, const TripleSlice& ts, double gamma, const MaterialParams& p,
                                         const RegWeightConfig& cfg);

// Discrete gradient norms of a no-slip face field with trapezoid edge weights:
// grad_sq = sym_sq + skw_sq, and skw_sq = sym_sq - div_sq by summation by parts.
// cell_skw_sq uses the cell-averaged rotation seen by the stress equation.
struct KornSums {
    double grad_sq = 0.0;
    double sym_sq = 0.0;
    double skw_sq = 0.0;
    double cell_skw_sq = 0.0;
    double div_sq = 0.0;
};
KornSums korn_sums(const VectorField& v);

struct InequalityRow {
    double time = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double defect = 0.0;
    double weight = 0.0;
    double tol = 0.0;
};

// tol(t) = constant * (h + hx^2) * scale(t), scale the magnitude of both sides.
struct InequalitySettings {
    double constant = 1.0;
};

struct InequalityReport {
    std::vector<InequalityRow> rows;
    double max_defect = -INFINITY;
    double max_ratio = -INFINITY;  // max defect / tol
    double worst_time = 0.0;
    bool pass = true;
};

// Evaluates the relative energy-dissipation inequality at every stored time of the
// trajectory (states with increasing time). Step integrands are taken at the right
// endpoint, the weight exponent by the trapezoid rule.
InequalityReport dissipative_inequality_check(const std::vector<State>& traj, const Forcing& forcing,
                                              const TestTriple& tt, double gamma, const MaterialParams& p,
                                              const RegWeightConfig& cfg, const InequalitySettings& settings);

}  // namespace vep
