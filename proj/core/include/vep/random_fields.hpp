#pragma once

#include <random>

#include "vep/operators.hpp"

namespace vep {

// Uniform random fields in [-amp, amp] per degree of freedom.
ScalarField random_scalar(const Grid& g, std::mt19937_64& rng, double amp = 1.0);
VectorField random_noslip(const Grid& g, std::mt19937_64& rng, double amp = 1.0);
// Discrete curl of a random edge potential: no-slip and divergence-free.
VectorField random_divfree(const Grid& g, std::mt19937_64& rng, double amp = 1.0);
StfField random_stf(const Grid& g, std::mt19937_64& rng, double amp = 1.0);
AntisymField random_antisym(const Grid& g, std::mt19937_64& rng, double amp = 1.0);

}  // namespace vep
