#pragma once

#include <array>
#include <string>

#include "vep/flow_stress.hpp"

namespace vep {

// Derivative table of a scalar function of (x, y, t): d[i][j][k] = d^i_x d^j_y d^k_t,
// spatial orders up to 5 in each axis, time order up to 1.
struct Derivs {
    std::array<std::array<std::array<double, 2>, 6>, 6> d{};
    double operator()(int i, int j, int k = 0) const { return d[i][j][k]; }
};

// A * X(x) Y(y) T(t) with X(s) = B((s - c)/w) cos(k (s - c) + theta), B the smooth
// bump exp(1 - 1/(1 - r^2)) on |r| < 1, and T(t) = B(t / t_support) (T = 1 when
// t_support is infinite).
struct SeparableBump {
    double amplitude = 0.0;
    std::array<double, 2> center{0.0, 0.0};
    std::array<double, 2> half_width{1.0, 1.0};
    std::array<double, 2> wave{0.0, 0.0};
    std::array<double, 2> phase{0.0, 0.0};
    double t_support = 0.0;

    Derivs eval(double x, double y, double t) const;
    double value(double x, double y, double t) const;
};

// Values and derivatives of a test triple at one point (2D). Index conventions:
// dv[i][j] = d_j v_i, ddv[i][j][l] = d_j d_l v_i, tensors as 2x2 matrices.
struct TriplePoint {
    double psi = 0.0;
    std::array<double, 2> v{}, vt{};
    std::array<std::array<double, 2>, 2> dv{};
    std::array<std::array<std::array<double, 2>, 2>, 2> ddv{};
    double phi = 0.0, phit = 0.0, lap_phi = 0.0;
    std::array<double, 2> gphi{};
    double mu = 0.0, lap_mu = 0.0;
    std::array<double, 2> gmu{};
    std::array<std::array<double, 2>, 2> S{}, St{}, lapS{};
    std::array<std::array<std::array<double, 2>, 2>, 2> gS{};  // gS[l][i][j] = d_l S_ij
};

struct TripleSpec {
    std::string family = "bump";
    double amplitude = 1.0;
    // Support box [x0, x1] x [y0, y1]; must lie strictly inside the domain.
    std::array<double, 4> box{0.0, 1.0, 0.0, 1.0};
    double frequency = 1.0;
    double t_support = 1.0;  // <= 0 means no time cutoff
    double velocity_scale = 1.0;
    double phase_scale = 0.5;
    double stress_scale = 0.2;
    double margin = 1e-3;
};

// Smooth compactly supported (v~, S~, phi~) with v~ = (d_y psi, -d_x psi). mu~ uses
// the unit-interface-width form mu~ = -lap phi~ + W'(phi~).
class TestTriple {
public:
    TestTriple() = default;
    TestTriple(SeparableBump psi, SeparableBump phi, SeparableBump s1, SeparableBump s2, double lambda);

    TriplePoint eval(double x, double y, double t) const;
    bool is_zero() const { return zero_; }
    double lambda() const { return lambda_; }
    const SeparableBump& psi() const { return psi_; }
    const SeparableBump& phi() const { return phi_; }

private:
    SeparableBump psi_, phi_, s1_, s2_;  // S~ = [[s1, s2], [s2, -s1]]
    double lambda_ = 0.0;
    bool zero_ = true;
};

// Builds the built-in family on a 2D domain. Certifies by dense sampling that the
// support lies inside the domain, |phi~| <= 1 - margin and, when `plastic` is given,
// |S~| <= (1 - margin) min(sigma1, sigma2). Throws DomainError otherwise.
TestTriple make_test_triple(const TripleSpec& spec, const Grid& g, double lambda,
                            const PlasticParams* plastic = nullptr);

// Grid samples. The velocity is the discrete curl of psi~ sampled at the nodes, so it
// is no-slip and discretely divergence-free.
VectorField triple_velocity(const TestTriple& tt, const Grid& g, double t);
VectorField triple_velocity_pointwise(const TestTriple& tt, const Grid& g, double t);
ScalarField triple_phi(const TestTriple& tt, const Grid& g, double t);
ScalarField triple_mu(const TestTriple& tt, const Grid& g, double t);
StfField triple_stress(const TestTriple& tt, const Grid& g, double t);
// v, S, phi, mu sampled at time t.
State triple_state(const TestTriple& tt, const Grid& g, double t);

}  // namespace vep
