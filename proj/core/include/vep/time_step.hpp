#pragma once

#include <functional>

#include "vep/ch_solver.hpp"
#include "vep/energetics.hpp"

namespace vep {

// Body force averaged over [t0, t1] on the faces of g (boundary-normal faces zero).
using Forcing = std::function<VectorField(const Grid& g, double t0, double t1)>;

struct StepOptions {
    double tol_outer = 1e-10;
    int max_outer = 50;
    double tol_lin = 1e-12;  // CH Newton and stress fixed-point tolerance
    int max_halvings = 4;
};

struct StepReport {
    int step = 0;
    double time = 0.0;
    double h = 0.0;
    EnergyBreakdown energy;
    DissipationBreakdown dissipation;  // time-averaged over substeps
    StepCertificate certificate;
    PartialDefects partial;
    double f_work = 0.0;  // time-averaged <f, v>
    double mass = 0.0;
    double max_phi = 0.0;
    double max_S = 0.0;
    double max_trace = 0.0;
    double max_div = 0.0;
    double plastic_integral = 0.0;  // int P(phi_k; S_{k+1}) of the last substep
    double ch_ratio = 0.0;
    int outer_iters = 0;
    int newton_iters = 0;
    int stress_iters = 0;
    int substeps = 1;
};

struct StepResult {
    State state;
    StfField xi;
    StepReport report;
};

// One step of the coupled scheme: Picard iteration CH -> density/flux -> momentum
// -> stress until the combined relative update is below tol_outer. On failure
// the step is retried as two half steps, at most max_halvings levels deep.
// Throws NonConvergence when the retries are exhausted.
StepResult picard_time_step(const State& k, double h, const MaterialParams& params, const Forcing& forcing,
                            const StepOptions& opt = {});

// Single attempt without retries.
StepResult picard_attempt(const State& k, double h, const MaterialParams& params, const Forcing& forcing,
                          const StepOptions& opt);

}  // namespace vep
