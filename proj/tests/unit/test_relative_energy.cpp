#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "../support/random_fields.hpp"
#include "../support/scenarios.hpp"
#include "vep/relative_energy.hpp"

using namespace vep;
using namespace vep::testing;

namespace {

TripleSpec bump_spec(double amplitude = 0.5) {
    TripleSpec sp;
    sp.box = {0.5, 3.5, 0.5, 3.5};
    sp.amplitude = amplitude;
    sp.t_support = 3.0;
    return sp;
}

State random_state(const Grid& g, std::mt19937_64& rng) {
    State s = State::zero(g);
    s.phi = random_scalar(g, rng, 0.9);
    s.mu = random_scalar(g, rng);
    s.v = random_noslip(g, rng);
    s.S = random_stf(g, rng);
    return s;
}

}  // namespace

TEST(TestTriple, ZeroAmplitudeIsZero) {
    const Grid g = Grid::square(8, 4.0);
    const auto m = spinodal_params();
    const TestTriple tt = make_test_triple(bump_spec(0.0), g, m.lambda);
    EXPECT_TRUE(tt.is_zero());
    const auto q = tt.eval(2.0, 2.0, 0.1);
    EXPECT_EQ(q.v[0], 0.0);
    EXPECT_EQ(q.phi, 0.0);
    EXPECT_EQ(q.S[0][1], 0.0);
    EXPECT_EQ(q.mu, w_prime(0.0, m.lambda));
    EXPECT_EQ(norm_linf(triple_velocity(tt, g, 0.1)), 0.0);
}

TEST(TestTriple, SampledVelocityIsNoSlipAndDivergenceFree) {
    const Grid g = Grid::square(24, 4.0);
    const TestTriple tt = make_test_triple(bump_spec(), g, 2.0);
    const VectorField v = triple_velocity(tt, g, 0.4);
    EXPECT_GT(norm_linf(v), 1e-3);
    EXPECT_LE(norm_linf(divergence(v)), 1e-12 * norm_linf(v) / g.spacing(0));
    VectorField w = v;
    w.enforce_no_slip();
    EXPECT_EQ(norm_linf(w - v), 0.0);
}

TEST(TestTriple, DerivativesMatchCentralDifferences) {
    const Grid g = Grid::square(8, 4.0);
    const TestTriple tt = make_test_triple(bump_spec(), g, 2.0);
    const double x = 1.7, y = 2.3, t = 0.6, d = 1e-3;
    const auto p = tt.eval(x, y, t);
    auto at = [&](double dx, double dy, double dt = 0.0) { return tt.eval(x + dx, y + dy, t + dt); };
    const double tol = 1e-4;
    const std::array<std::array<double, 2>, 2> e{{{d, 0.0}, {0.0, d}}};
    for (int j = 0; j < 2; ++j) {
        const auto P = at(e[j][0], e[j][1]), M = at(-e[j][0], -e[j][1]);
        EXPECT_NEAR(p.gphi[j], (P.phi - M.phi) / (2 * d), tol);
        EXPECT_NEAR(p.gmu[j], (P.mu - M.mu) / (2 * d), tol);
        for (int i = 0; i < 2; ++i) {
            EXPECT_NEAR(p.dv[i][j], (P.v[i] - M.v[i]) / (2 * d), tol);
            for (int l = 0; l < 2; ++l) {
                EXPECT_NEAR(p.ddv[i][l][j], (P.dv[i][l] - M.dv[i][l]) / (2 * d), tol);
                EXPECT_NEAR(p.gS[j][i][l], (P.S[i][l] - M.S[i][l]) / (2 * d), tol);
            }
        }
    }
    EXPECT_NEAR(p.v[0], (tt.psi().value(x, y + d, t) - tt.psi().value(x, y - d, t)) / (2 * d), tol);
    EXPECT_NEAR(p.v[1], -(tt.psi().value(x + d, y, t) - tt.psi().value(x - d, y, t)) / (2 * d), tol);

    auto lap = [&](auto f) {
        return (f(at(d, 0)) + f(at(-d, 0)) + f(at(0, d)) + f(at(0, -d)) - 4.0 * f(p)) / (d * d);
    };
    EXPECT_NEAR(p.lap_phi, lap([](const TriplePoint& q) { return q.phi; }), 10 * tol);
    EXPECT_NEAR(p.lap_mu, lap([](const TriplePoint& q) { return q.mu; }), 10 * tol);
    for (int i = 0; i < 2; ++i)
        for (int l = 0; l < 2; ++l)
            EXPECT_NEAR(p.lapS[i][l], lap([&](const TriplePoint& q) { return q.S[i][l]; }), 10 * tol);
    EXPECT_NEAR(p.mu, -p.lap_phi + w_prime(p.phi, 2.0), 1e-12);

    const auto P = at(0, 0, d), M = at(0, 0, -d);
    EXPECT_NEAR(p.phit, (P.phi - M.phi) / (2 * d), tol);
    for (int i = 0; i < 2; ++i) {
        EXPECT_NEAR(p.vt[i], (P.v[i] - M.v[i]) / (2 * d), tol);
        for (int l = 0; l < 2; ++l) EXPECT_NEAR(p.St[i][l], (P.S[i][l] - M.S[i][l]) / (2 * d), tol);
    }
    EXPECT_NEAR(p.S[0][0] + p.S[1][1], 0.0, 1e-15);
    EXPECT_EQ(p.S[0][1], p.S[1][0]);
}

TEST(TestTriple, SupportIsCompact) {
    const Grid g = Grid::square(8, 4.0);
    const TestTriple tt = make_test_triple(bump_spec(), g, 2.0);
    for (const auto& q : {tt.eval(0.3, 2.0, 0.0), tt.eval(2.0, 3.7, 0.0), tt.eval(2.0, 2.0, 3.5)}) {
        EXPECT_EQ(q.v[0], 0.0);
        EXPECT_EQ(q.phi, 0.0);
        EXPECT_EQ(q.S[0][0], 0.0);
    }
}

TEST(TestTriple, ConstructionRejectsInvalidSpecs) {
    const Grid g = Grid::square(8, 4.0);
    const auto m = spinodal_params();
    TripleSpec sp = bump_spec();
    sp.family = "polynomial";
    EXPECT_THROW(make_test_triple(sp, g, 2.0), std::invalid_argument);
    sp = bump_spec();
    sp.box = {0.5, 4.5, 0.5, 3.5};
    EXPECT_THROW(make_test_triple(sp, g, 2.0), DomainError);
    sp = bump_spec(2.5);
    EXPECT_THROW(make_test_triple(sp, g, 2.0), DomainError);
    sp = bump_spec();
    sp.stress_scale = 5.0;
    EXPECT_NO_THROW(make_test_triple(sp, g, 2.0));
    EXPECT_THROW(make_test_triple(sp, g, 2.0, &m.plastic), DomainError);
    sp = bump_spec();
    sp.margin = 0.0;
    EXPECT_THROW(make_test_triple(sp, g, 2.0), std::invalid_argument);
    EXPECT_THROW(make_test_triple(bump_spec(), Grid::make(3, {4, 4, 4}, {4, 4, 4}), 2.0), std::invalid_argument);
}

TEST(RelativeEnergy, VanishesAtTheSampledTriple) {
    const Grid g = Grid::square(16, 4.0);
    const auto m = spinodal_params();
    const TestTriple tt = make_test_triple(bump_spec(), g, m.lambda, &m.plastic);
    const auto ts = sample_triple(tt, g, 0.3);
    const auto r = relative_energy(triple_state(tt, g, 0.3), ts, m);
    EXPECT_EQ(r.total, 0.0);
}

TEST(RelativeEnergy, PointwiseVelocityGapConvergesAtSecondOrder) {
    const auto m = spinodal_params();
    std::array<double, 2> R{};
    for (int k = 0; k < 2; ++k) {
        const Grid g = Grid::square(16 << k, 4.0);
        const TestTriple tt = make_test_triple(bump_spec(), g, m.lambda);
        State s = triple_state(tt, g, 0.3);
        s.v = triple_velocity_pointwise(tt, g, 0.3);
        R[k] = relative_energy(s, sample_triple(tt, g, 0.3), m).total;
        EXPECT_GT(R[k], 0.0);
    }
    EXPECT_GT(std::log2(R[0] / R[1]), 2.0);
}

TEST(RelativeEnergy, ZeroTripleReducesToShiftedEnergy) {
    const Grid g = Grid::make(2, {9, 7, 1}, {3.0, 2.0, 1.0});
    const auto m = spinodal_params();
    TripleSpec sp = bump_spec(0.0);
    sp.box = {0.5, 2.5, 0.5, 1.5};
    const TestTriple tt = make_test_triple(sp, g, m.lambda);
    std::mt19937_64 rng(5);
    const State s = random_state(g, rng);
    const auto r = relative_energy(s, sample_triple(tt, g, 0.0), m);
    const auto e = energy_total(s, m);
    double w = 0.0;
    for (double f : s.phi.v) w += w_kappa_eval(f, m.lambda, m.kappa) - w_kappa_eval(0.0, m.lambda, m.kappa);
    const double ref = e.e_kin + e.e_el + 0.5 * gradient_energy(s.phi) + w * g.cell_volume();
    EXPECT_NEAR(r.total, ref, 1e-12 * std::abs(ref));
}

TEST(RelativeEnergy, PhasePartIsNonnegative) {
    const Grid g = Grid::square(12, 4.0);
    const auto m = spinodal_params();
    const TestTriple tt = make_test_triple(bump_spec(1.5), g, m.lambda);
    const auto ts = sample_triple(tt, g, 0.2);
    std::mt19937_64 rng(6);
    for (int k = 0; k < 200; ++k) {
        const State s = random_state(g, rng);
        EXPECT_GE(relative_energy(s, ts, m).pf, -1e-12);
    }
}

TEST(RelativeEnergy, RequiresUnitInterfaceWidth) {
    const Grid g = Grid::square(8, 4.0);
    auto m = spinodal_params();
    m.epsilon = 0.5;
    const auto ts = sample_triple(make_test_triple(bump_spec(), g, m.lambda), g, 0.0);
    EXPECT_THROW(relative_energy(State::zero(g), ts, m), std::invalid_argument);
    EXPECT_THROW(relative_dissipation(State::zero(g), ts, 0.0, m, {}), std::invalid_argument);
}

TEST(RegularityWeight, ZeroForZeroTripleAndQuadraticInStress) {
    const Grid g = Grid::square(16, 4.0);
    const auto m = spinodal_params();
    EXPECT_EQ(regularity_weight(sample_triple(make_test_triple(bump_spec(0.0), g, m.lambda), g, 0.0), m, {}), 0.0);
    TripleSpec sp = bump_spec();
    const double k1 = regularity_weight(sample_triple(make_test_triple(sp, g, m.lambda), g, 0.0), m, {});
    sp.stress_scale *= 2.0;
    const double k2 = regularity_weight(sample_triple(make_test_triple(sp, g, m.lambda), g, 0.0), m, {});
    EXPECT_GT(k1, 0.0);
    EXPECT_NEAR(k2, 4.0 * k1, 1e-12 * k2);
    RegWeightConfig c;
    c.multiplier = 3.0;
    EXPECT_NEAR(regularity_weight(sample_triple(make_test_triple(sp, g, m.lambda), g, 0.0), m, c), 3.0 * k2,
                1e-12 * k2);
    c.multiplier = -1.0;
    EXPECT_THROW(c.validate(m), std::invalid_argument);
}

TEST(Korn, DiscreteIdentitiesAndConstant) {
    std::mt19937_64 rng(7);
    for (int k = 0; k < 1000; ++k) {
        const Grid g = Grid::make(2, {4 + int(rng() % 6), 4 + int(rng() % 6), 1}, {1.0 + (rng() % 3), 2.0, 1.0});
        const VectorField v = random_noslip(g, rng);
        const KornSums s = korn_sums(v);
        const double scale = s.grad_sq;
        EXPECT_NEAR(s.skw_sq, s.sym_sq - s.div_sq, 1e-12 * scale);
        EXPECT_LE(s.grad_sq, 2.0 * (1.0 + 1e-12) * s.sym_sq);
        EXPECT_LE(s.cell_skw_sq, s.skw_sq * (1.0 + 1e-12));
    }
}

TEST(SystemOperator, ZeroTripleHasZeroResidual) {
    const Grid g = Grid::square(12, 4.0);
    const auto m = spinodal_params();
    const auto ts = sample_triple(make_test_triple(bump_spec(0.0), g, m.lambda), g, 0.0);
    const auto r = system_residual(ts, m.gamma, m);
    EXPECT_EQ(norm_linf(r.momentum), 0.0);
    EXPECT_EQ(norm_linf(r.stress), 0.0);
    EXPECT_EQ(norm_linf(r.phase), 0.0);
    std::mt19937_64 rng(8);
    EXPECT_EQ(system_operator_apply(r, relative_trial(random_state(g, rng), ts, m)).total, 0.0);
}

TEST(SystemOperator, LinearInTrial) {
    const Grid g = Grid::square(12, 4.0);
    const auto m = spinodal_params();
    const auto ts = sample_triple(make_test_triple(bump_spec(), g, m.lambda), g, 0.5);
    const auto r = system_residual(ts, m.gamma, m);
    std::mt19937_64 rng(9);
    const Trial a = relative_trial(random_state(g, rng), ts, m);
    const Trial b = relative_trial(random_state(g, rng), ts, m);
    const Trial c{2.0 * a.Phi - b.Phi, 2.0 * a.Psi - b.Psi, 2.0 * a.zeta - b.zeta};
    const double pa = system_operator_apply(r, a).total, pb = system_operator_apply(r, b).total;
    EXPECT_NEAR(system_operator_apply(r, c).total, 2.0 * pa - pb, 1e-12 * (std::abs(pa) + std::abs(pb)));
}

TEST(SystemOperator, TrialVanishesAtTheSampledTriple) {
    const Grid g = Grid::square(12, 4.0);
    const auto m = spinodal_params();
    const TestTriple tt = make_test_triple(bump_spec(), g, m.lambda);
    const Trial tr = relative_trial(triple_state(tt, g, 0.5), sample_triple(tt, g, 0.5), m);
    EXPECT_EQ(norm_linf(tr.Phi), 0.0);
    EXPECT_EQ(norm_linf(tr.Psi), 0.0);
    EXPECT_EQ(norm_linf(tr.zeta), 0.0);
}

TEST(RelativeDissipation, VanishesAtTheSampledTriple) {
    const Grid g = Grid::square(16, 4.0);
    const auto m = spinodal_params();
    const TestTriple tt = make_test_triple(bump_spec(), g, m.lambda, &m.plastic);
    const auto ts = sample_triple(tt, g, 0.5);
    const auto W = relative_dissipation(triple_state(tt, g, 0.5), ts, m.gamma, m, {});
    EXPECT_NEAR(W.total, 0.0, 1e-12 * 0.5 * gradient_energy(ts.mu));
    EXPECT_GT(W.weight, 0.0);
}

TEST(RelativeDissipation, QuadraticPartIsNonnegative) {
    const Grid g = Grid::square(10, 4.0);
    const auto m = spinodal_params();
    TripleSpec sp = bump_spec(1.0);
    sp.stress_scale = 0.45;
    const auto ts = sample_triple(make_test_triple(sp, g, m.lambda), g, 0.1);
    std::mt19937_64 rng(10);
    for (int k = 0; k < 1000; ++k) {
        State s = random_state(g, rng);
        s.S = (k % 3 == 0 ? 20.0 : 1.0) * s.S;
        const auto W = relative_dissipation(s, ts, m.gamma, m, {});
        const double scale = std::abs(W.q_commutator) + W.q_weight + 1.0;
        EXPECT_GE(W.q, -1e-10 * scale) << "sample " << k;
    }
}

TEST(RelativeDissipation, WeightIsNeededForTheCommutator) {
    const Grid g = Grid::square(10, 4.0);
    const auto m = spinodal_params();
    TripleSpec sp = bump_spec(1.0);
    sp.phase_scale = 0.0;
    sp.stress_scale = 0.45;
    const auto ts = sample_triple(make_test_triple(sp, g, m.lambda), g, 0.1);
    std::mt19937_64 rng(11);
    State s = State::zero(g);
    s.v = random_noslip(g, rng);
    s.S = random_stf(g, rng);
    RegWeightConfig none;
    none.multiplier = 0.0;
    auto W = relative_dissipation(s, ts, m.gamma, m, none);
    const double sign = W.q_commutator > 0.0 ? -1.0 : 1.0;
    const double grow = 4.0 * W.q / std::abs(W.q_commutator) + 1.0;
    s.S = ts.S + (sign * grow) * (s.S - ts.S);
    W = relative_dissipation(s, ts, m.gamma, m, none);
    EXPECT_LT(W.q, 0.0);
    EXPECT_GE(relative_dissipation(s, ts, m.gamma, m, {}).q, 0.0);
}

// dR/dt(U~ | fixed U) + <A(U~), trial> + W = 0 for a stationary numerical state with
// multiplier 0, up to the spatial discretization error.
TEST(RelativeDissipation, StationaryIdentityConverges) {
    auto m = spinodal_params(0.01);
    RegWeightConfig c;
    c.multiplier = 0.0;
    std::array<double, 2> gap{};
    double size = 0.0;
    for (int k = 0; k < 2; ++k) {
        const Grid g = Grid::square(32 << k, 4.0);
        const TestTriple tt = make_test_triple(bump_spec(), g, m.lambda, &m.plastic);
        State s = State::zero(g);
        s.phi = ScalarField(g, 0.3);
        s.mu = ScalarField(g, w_prime(0.3, m.lambda));
        const double t = 0.7, dt = 1e-4;
        const double dR = (relative_energy(s, sample_triple(tt, g, t + dt), m).total -
                           relative_energy(s, sample_triple(tt, g, t - dt), m).total) /
                          (2 * dt);
        const auto ts = sample_triple(tt, g, t);
        const double pair = system_operator_apply(system_residual(ts, m.gamma, m), relative_trial(s, ts, m)).total;
        gap[k] = dR + pair + relative_dissipation(s, ts, m.gamma, m, c).total;
        size = std::abs(pair);
    }
    EXPECT_GT(std::abs(gap[0]) / std::abs(gap[1]), 3.0);
    EXPECT_LT(std::abs(gap[1]), 2e-3 * size);
}

class InequalityRun : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        const Grid g = Grid::square(16, 8.0);
        State s = spinodal_state(g, 3);
        traj_ = new std::vector<State>{s};
        for (int k = 0; k < 12; ++k) {
            auto r = picard_time_step(s, 0.25, spinodal_params(), nullptr);
            ASSERT_TRUE(r.report.certificate.pass);
            s = r.state;
            traj_->push_back(s);
        }
    }
    static void TearDownTestSuite() { delete traj_; }
    static std::vector<State>* traj_;
};
std::vector<State>* InequalityRun::traj_ = nullptr;

TEST_F(InequalityRun, ZeroTriplePasses) {
    const auto m = spinodal_params();
    const Grid& g = traj_->front().phi.grid;
    TripleSpec sp;
    sp.amplitude = 0.0;
    sp.box = {0.5, 7.5, 0.5, 7.5};
    const auto rep = dissipative_inequality_check(*traj_, nullptr, make_test_triple(sp, g, m.lambda), m.gamma, m,
                                                  {}, {});
    EXPECT_TRUE(rep.pass) << rep.max_ratio;
    ASSERT_EQ(rep.rows.size(), traj_->size());
    for (const auto& r : rep.rows) EXPECT_EQ(r.weight, 0.0);
    EXPECT_LE(rep.rows.back().rhs, rep.rows.front().rhs * (1 + 1e-14));
}

TEST_F(InequalityRun, NonzeroTriplePassesAndWeightScales) {
    const auto m = spinodal_params();
    const Grid& g = traj_->front().phi.grid;
    TripleSpec sp;
    sp.amplitude = 0.3;
    sp.frequency = 0.5;
    sp.t_support = 20.0;
    sp.box = {0.5, 7.5, 0.5, 7.5};
    const TestTriple tt = make_test_triple(sp, g, m.lambda, &m.plastic);
    RegWeightConfig c2;
    c2.multiplier = 2.0;
    const auto r1 = dissipative_inequality_check(*traj_, nullptr, tt, m.gamma, m, {}, {});
    const auto r2 = dissipative_inequality_check(*traj_, nullptr, tt, m.gamma, m, c2, {});
    EXPECT_TRUE(r1.pass) << r1.max_ratio;
    EXPECT_TRUE(r2.pass) << r2.max_ratio;
    for (std::size_t k = 0; k < r1.rows.size(); ++k) {
        EXPECT_GT(r1.rows[k].weight, 0.0);
        EXPECT_NEAR(r2.rows[k].weight, 2.0 * r1.rows[k].weight, 1e-12 * r2.rows[k].weight);
        EXPECT_GE(r2.rows[k].rhs, r1.rows[k].rhs);
    }
}

TEST_F(InequalityRun, EnergyGainingTrajectoryFails) {
    const auto m = spinodal_params();
    const Grid& g = traj_->front().phi.grid;
    std::mt19937_64 rng(12);
    const VectorField kick = random_divfree(g, rng, 0.5);
    std::vector<State> bogus = *traj_;
    for (std::size_t k = 0; k < bogus.size(); ++k) bogus[k].v = double(k) * kick;
    TripleSpec sp;
    sp.amplitude = 0.0;
    sp.box = {0.5, 7.5, 0.5, 7.5};
    const auto rep = dissipative_inequality_check(bogus, nullptr, make_test_triple(sp, g, m.lambda), m.gamma, m, {}, {});
    EXPECT_FALSE(rep.pass);
    EXPECT_GT(rep.worst_time, 0.0);
    EXPECT_GT(rep.max_ratio, 1.0);
}

TEST(Inequality, RejectsNonIncreasingTimes) {
    const Grid g = Grid::square(8, 4.0);
    const auto m = spinodal_params();
    std::vector<State> traj{State::zero(g), State::zero(g)};
    EXPECT_THROW(dissipative_inequality_check(traj, nullptr, make_test_triple(bump_spec(0.0), g, m.lambda), 0.0, m,
                                              {}, {}),
                 std::invalid_argument);
}
