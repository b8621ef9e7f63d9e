#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vep/config.hpp"
#include "vep/field_io.hpp"

namespace vep {

// Deterministic under cfg.seed.
//   spinodal: phi0 = mean + uniform noise, shifted per cell only where needed to keep
//     |phi0| <= 1 - 1e-3 and then corrected to the exact mean; v0 = 0, S0 = 0.
//   shear-yield: phase-1 band with tanh interfaces and a shear stress at given
//     fractions of the local yield radius inside and outside the band.
//   manufactured: the verifier's test triple sampled at t = 0.
// mu0 = -eps lap phi0 + W'(phi0)/eps in every case.
State make_initial_data(const RunConfig& cfg);

FieldBundle state_to_bundle(const State& s);
State state_from_bundle(const FieldBundle& b);

struct VerifySummary {
    bool ran = false;
    bool pass = false;
    bool pass_doubled = false;  // same data with the weight doubled
    double max_defect = 0.0;
    double max_ratio = 0.0;
    double worst_time = 0.0;
    std::size_t rows = 0;
    std::string report_path;
};

struct RunManifest {
    std::string config_hash;
    std::string code_version;
    double wall_seconds = 0.0;
    std::string status;  // completed | failed
    int steps_requested = 0;
    int steps_completed = 0;
    int start_step = 0;
    int certified_steps = 0;
    bool all_certified = false;
    bool energy_nonincreasing = false;
    double max_defect_ratio = 0.0;  // max certificate defect / tol
    int failure_step = -1;
    std::string failure_message;
    double e_tot0 = 0.0;
    double sup_e_tot = 0.0;
    double work = 0.0;            // cumulative h * f_work
    double max_energy_excess = 0.0;  // max_t E(t) - E(0) - work(t)
    double tol_sum = 0.0;         // sum of step certificate tolerances
    std::string csv_path, diagnostics_path, config_copy, manifest_path;
    std::vector<std::string> checkpoints;
    VerifySummary verify;

    // Not serialized: states at every completed step (the initial state first).
    std::vector<State> trajectory;
    std::vector<double> work_history;  // cumulative work at each trajectory entry
};

struct RunOptions {
    std::optional<std::string> restart_from;  // checkpoint bundle to continue from
    bool write_files = true;
    bool keep_trajectory = false;  // always kept while verification is enabled
    std::function<void(const StepReport&)> on_step;
};

// Time loop over picard_time_step. Writes into cfg.output.dir: config.cfg (canonical
// copy), run.csv, diagnostics.csv, checkpoints/, verify.csv when enabled, and
// manifest.json. Nonconvergence stops the loop and is recorded, not thrown.
RunManifest run_simulation(const RunConfig& cfg, const RunOptions& opt = {});

// Exit status convention of the CLI: every step certified and the run completed.
bool run_succeeded(const RunManifest& m);

// Offline relative-energy check over the checkpoints stored in a run directory.
VerifySummary verify_run_directory(const RunConfig& cfg, const std::string& dir);

struct SweepMember {
    double gamma = 0.0;
    RunManifest run;
    double bound = 0.0;  // E(0) + max_t work(t) + certificate tolerance sum
    bool bounded = false;
    double distance_max = 0.0;  // max_t relative_energy(U_gamma(t) | U_0(t))
    double distance_final = 0.0;
};

struct SweepReport {
    std::vector<SweepMember> members;
    bool all_bounded = false;
    bool all_certified = false;
    bool distance_monotone = false;  // reported, not required
    std::string csv_path;
};

// One run per cfg.gammas entry with shared initial data, written to
// cfg.output.dir/gamma_<index>; members run concurrently (cfg.sweep_jobs).
SweepReport run_gamma_sweep(const RunConfig& cfg);

std::string code_version();

}  // namespace vep
