#pragma once

#include <random>

#include "vep/time_step.hpp"

namespace vep::testing {

inline MaterialParams spinodal_params(double gamma = 1e-3) {
    MaterialParams p;
    p.rho1 = 1.0, p.rho2 = 2.0;
    p.nu = {1.0, 2.0};
    p.eta = {1.0, 0.5};
    p.lambda = 2.0, p.kappa = 2.0, p.epsilon = 1.0;
    p.gamma = gamma;
    p.plastic = {1.0, 1.0, 1e-3, 1e-3, 0.5, 0.3};
    return p;
}

inline State spinodal_state(const Grid& g, unsigned seed, double mean = 0.1, double amp = 0.05) {
    State s = State::zero(g);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-amp, amp);
    for (auto& x : s.phi.v) x = mean + U(rng);
    return s;
}

}  // namespace vep::testing
