#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vep/materials.hpp"

namespace vep {

// Outcome of one oracle comparison: pass iff value <= limit.
struct OracleCheck {
    std::string name;
    double value = 0.0;
    double limit = 0.0;
    bool pass = false;
    std::string detail;
};

// Closed-form prox against a coarse-to-fine grid search of the radial objective
// (final resolution `resolution` in the radius), over random (phi, Z, h). Also counts
// the three regimes (zero, interior, on the yield ball) and certifies the
// subgradient inequality on `directions` random admissible directions per sample.
struct ProxOracleSettings {
    int samples = 10000;
    int directions = 1000;
    double resolution = 1e-6;
    std::uint64_t seed = 1;
};
std::vector<OracleCheck> prox_oracle_checks(const PlasticParams& p, const ProxOracleSettings& s = {});

// Discrete integration by parts, advection skew-symmetry and Jaumann neutrality on
// random fields, each normalized by the product of the involved norms.
std::vector<OracleCheck> operator_identity_checks(std::uint64_t seed = 1, int trials = 20);

// Error ratios between 32^2 and 64^2 grids on smooth manufactured fields; passes
// when the ratio lies in [3.2, 4.8].
std::vector<OracleCheck> operator_convergence_checks();

// On an 8x8 grid with gamma > 0: the stress step solver against a dense monolithic
// projected-gradient iteration on the same inclusion (max abs difference).
OracleCheck stress_bruteforce_check(std::uint64_t seed = 3, double gamma = 0.05);

}  // namespace vep
