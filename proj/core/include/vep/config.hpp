#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "vep/relative_energy.hpp"

namespace vep {

// Malformed file: unknown key, bad value type, duplicate key. The message starts
// with the key path (section.key) or the line number.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A well-formed configuration that breaks a modelling assumption (coefficient
// bounds, admissible initial data). The message names the assumption.
struct AssumptionViolation : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InitialSpec {
    std::string scenario = "spinodal";  // spinodal | shear-yield | manufactured
    double mean = 0.0;
    double noise = 0.05;
    // shear-yield: a horizontal band of phase 1 with half width band_width * Ly, a
    // tanh interface of unit width, and a shear stress of stress_inside (in the band)
    // and stress_outside times the local yield radius.
    double band_width = 0.25;
    double phase_contrast = 0.8;
    double stress_inside = 0.95;
    double stress_outside = 0.3;
};

struct ForcingSpec {
    std::string preset = "none";  // none | shear
    // shear: f = amplitude cos(frequency t) sin(pi y / Ly) e_x, step-averaged exactly.
    double amplitude = 0.0;
    double frequency = 0.0;
};

struct OutputSpec {
    std::string dir = "run";
    int checkpoint_every = 1;  // 0 writes only the final state
};

struct VerifySpec {
    bool enabled = true;
    TripleSpec triple;
    RegWeightConfig weight;
    InequalitySettings settings;
};

struct RunConfig {
    Grid grid = Grid::square(32, 8.0);
    MaterialParams material;
    double h = 0.25;
    int steps = 10;
    std::uint64_t seed = 1;
    InitialSpec initial;
    ForcingSpec forcing;
    StepOptions solver;
    std::vector<double> gammas{1e-1, 1e-2, 1e-3, 1e-4, 0.0};
    int sweep_jobs = 0;  // 0: one per hardware thread
    OutputSpec output;
    VerifySpec verify;

    // Checks every assumption and cross-field constraint; throws AssumptionViolation
    // or ConfigError.
    void validate() const;
};

RunConfig default_config();
// Parses the key-value grammar documented in docs/config_format.md and validates.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
// Every field in a fixed order and round-trip precision; parse_config accepts it.
std::string canonical_config(const RunConfig& cfg);
// 64-bit FNV-1a of canonical_config with the output directory blanked, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

// The configured body force (empty function for preset none).
Forcing make_forcing(const ForcingSpec& f);

}  // namespace vep
