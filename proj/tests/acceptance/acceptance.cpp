#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "vep/energetics.hpp"
#include "vep/oracles.hpp"
#include "vep/random_fields.hpp"
#include "vep/simulation.hpp"

namespace fs = std::filesystem;
using namespace vep;

namespace {

// Pinned tolerances.
constexpr double kMaxRunSeconds = 300.0;
constexpr double kMassRelTol = 1e-11;
constexpr double kPhiBound = 1.0 - 1e-9;
constexpr double kTraceTol = 1e-13;
constexpr double kProxTol = 1e-6;
constexpr double kProxResolution = 1e-6;
constexpr double kSubgradientSlack = 1e-10;
constexpr int kProxSamples = 10000;
constexpr int kProxDirections = 1000;
constexpr double kIdentityTol = 1e-12;
constexpr double kRichardsonTarget = 4.0;
constexpr double kRichardsonBand = 0.2;
constexpr double kBruteForceTol = 1e-7;
constexpr double kRelativeOrder = 2.0;
constexpr double kQuadraticTol = 1e-10;
constexpr int kQuadraticSamples = 1000;
constexpr int kKornSamples = 1000;
constexpr double kKornConstant = 1.4142135623730951;
constexpr double kKornRoundoff = 1e-12;

struct Outcome {
    int id;
    std::string title;
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

RunConfig spinodal_config(const fs::path& dir) {
    RunConfig c = default_config();
    c.grid = Grid::square(64, 8.0);
    c.steps = 100;
    c.h = 0.25;
    c.material.gamma = 1e-3;
    c.initial.scenario = "spinodal";
    c.forcing = {};
    c.verify.triple.t_support = c.h * c.steps;
    c.output.dir = dir.string();
    c.output.checkpoint_every = 10;
    return c;
}

RunConfig shear_config(const fs::path& dir, int n, int steps) {
    RunConfig c = default_config();
    c.grid = Grid::square(n, 8.0);
    c.steps = steps;
    c.h = 0.25;
    c.initial.scenario = "shear-yield";
    c.forcing = {"shear", 0.5, 0.8};
    c.verify.triple.t_support = c.h * steps;
    c.output.dir = dir.string();
    c.output.checkpoint_every = 10;
    return c;
}

struct Pairing {
    std::string label;
    bool pass_k = false;
    bool pass_2k = false;
};

Pairing check_pair(const std::string& label, const RunConfig& cfg, const std::vector<State>& traj,
                   const TripleSpec& spec) {
    const TestTriple tt = make_test_triple(spec, cfg.grid, cfg.material.lambda, &cfg.material.plastic);
    const Forcing f = make_forcing(cfg.forcing);
    RegWeightConfig doubled = cfg.verify.weight;
    doubled.multiplier *= 2.0;
    Pairing p{label};
    p.pass_k = dissipative_inequality_check(traj, f, tt, cfg.material.gamma, cfg.material, cfg.verify.weight,
                                            cfg.verify.settings)
                   .pass;
    p.pass_2k =
        dissipative_inequality_check(traj, f, tt, cfg.material.gamma, cfg.material, doubled, cfg.verify.settings).pass;
    return p;
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "vep_acceptance";
    fs::remove_all(work);
    fs::create_directories(work);
    std::vector<Outcome> out;
    auto report = [&](Outcome o) {
        std::printf("criterion %2d: %s  %s | %s\n", o.id, o.pass ? "PASS" : "FAIL", o.title.c_str(), o.detail.c_str());
        std::fflush(stdout);
        out.push_back(std::move(o));
    };

    // 1, 2: unforced spinodal run.
    const RunConfig spin = spinodal_config(work / "spinodal");
    RunOptions keep;
    keep.keep_trajectory = true;
    const RunManifest run = run_simulation(spin, keep);
    {
        int strict_increases = 0;
        for (std::size_t k = 1; k < run.trajectory.size(); ++k)
            if (energy_total(run.trajectory[k], spin.material).e_tot >
                energy_total(run.trajectory[k - 1], spin.material).e_tot)
                ++strict_increases;
        const bool ok = run.status == "completed" && run.steps_completed == spin.steps && run.all_certified &&
                        run.energy_nonincreasing && strict_increases == 0 && run.wall_seconds <= kMaxRunSeconds;
        report({1, "energy-dissipation certificate (spinodal 64^2, 100 steps, gamma 1e-3)", ok,
                fmt("%d/%d steps certified, max defect/tol %.3e, energy increases %d, %.1f s (limit %.0f s)",
                    run.certified_steps, run.steps_completed, run.max_defect_ratio, strict_increases,
                    run.wall_seconds, kMaxRunSeconds)});
    }
    {
        double m0 = 0.0, mass_dev = 0.0, max_phi = 0.0, max_trace = 0.0;
        for (std::size_t k = 0; k < run.trajectory.size(); ++k) {
            const BoundsAndMass b = check_bounds_and_mass(run.trajectory[k]);
            if (k == 0) m0 = b.mass;
            mass_dev = std::max(mass_dev, std::abs(b.mass - m0));
            max_phi = std::max(max_phi, b.max_phi);
            max_trace = std::max(max_trace, b.max_trace);
        }
        const double rel = mass_dev / std::abs(m0);
        const bool ok = run.trajectory.size() == std::size_t(spin.steps + 1) && rel <= kMassRelTol &&
                        max_phi <= kPhiBound && max_trace <= kTraceTol;
        report({2, "mass conservation and bounds", ok,
                fmt("relative mass drift %.3e (limit %.0e), max|phi| %.12f (limit 1-1e-9), max|tr S| %.3e (limit %.0e)",
                    rel, kMassRelTol, max_phi, max_trace, kTraceTol)});
    }

    // 3: proximal map.
    {
        ProxOracleSettings ps;
        ps.samples = kProxSamples;
        ps.directions = kProxDirections;
        ps.resolution = kProxResolution;
        const auto checks = prox_oracle_checks(spin.material.plastic, ps);
        bool ok = checks.size() == 3;
        std::string detail;
        for (const auto& c : checks) {
            const double limit = c.name.find("grid search") != std::string::npos ? kProxTol
                                 : c.name.find("subgradient") != std::string::npos ? kSubgradientSlack
                                                                                    : c.limit;
            ok = ok && c.pass && c.value <= limit;
            detail += fmt("%s %.3e; ", c.name.c_str(), c.value);
        }
        detail += checks.empty() ? "" : checks.front().detail;
        report({3, "proximal map vs grid-search oracle", ok, detail});
    }

    // 4: operator identities and convergence.
    {
        const auto ident = operator_identity_checks(1, 20);
        const auto conv = operator_convergence_checks();
        bool ok_i = !ident.empty(), ok_c = !conv.empty();
        double worst_i = 0.0, worst_c = 0.0;
        for (const auto& c : ident) {
            ok_i = ok_i && c.value <= kIdentityTol;
            worst_i = std::max(worst_i, c.value);
        }
        // value = |ratio - 4|
        for (const auto& c : conv) {
            ok_c = ok_c && c.value <= kRichardsonBand * kRichardsonTarget;
            worst_c = std::max(worst_c, c.value);
        }
        report({4, "discrete operator identities and Richardson ratios", ok_i && ok_c,
                fmt("%zu identities, worst %.3e (limit %.0e); %zu ratios, max |ratio - 4| %.3f (limit %.1f)",
                    ident.size(), worst_i, kIdentityTol, conv.size(), worst_c, kRichardsonBand * kRichardsonTarget)});
    }

    // 5: stress solver brute force.
    {
        const OracleCheck c = stress_bruteforce_check(3, 0.05);
        report({5, "stress step vs dense projected gradient (8^2, gamma 0.05)", c.value <= kBruteForceTol,
                fmt("max difference %.3e (limit %.0e), %s", c.value, kBruteForceTol, c.detail.c_str())});
    }

    // 6: relative-energy consistency.
    {
        const MaterialParams& m = spin.material;
        TripleSpec sp;
        sp.amplitude = 0.5;
        sp.box = {0.5, 3.5, 0.5, 3.5};
        sp.t_support = 3.0;
        const double t = 0.3;
        std::vector<double> self, gap;
        bool self_ok = true;
        for (int n : {16, 32, 64}) {
            const Grid g = Grid::square(n, 4.0);
            const TestTriple tt = make_test_triple(sp, g, m.lambda);
            const TripleSlice ts = sample_triple(tt, g, t);
            State s = triple_state(tt, g, t);
            const double r_self = relative_energy(s, ts, m).total;
            const double hx = g.spacing(0);
            self_ok = self_ok && std::abs(r_self) <= spin.verify.settings.constant * hx * hx;
            self.push_back(r_self);
            s.v = triple_velocity_pointwise(tt, g, t);
            gap.push_back(relative_energy(s, ts, m).total);
        }
        double min_order = INFINITY;
        for (std::size_t i = 1; i < gap.size(); ++i) min_order = std::min(min_order, std::log2(gap[i - 1] / gap[i]));
        TripleSpec zero = spin.verify.triple;
        zero.amplitude = 0.0;
        const Pairing z = check_pair("zero", spin, run.trajectory, zero);
        const bool crit1 = out.front().pass;
        const bool ok = self_ok && gap.back() > 0.0 && min_order >= kRelativeOrder && (!crit1 || z.pass_k);
        report({6, "relative-energy consistency", ok,
                fmt("R(U|U) max %.3e on 16/32/64; pointwise-velocity gap orders >= %.2f (limit %.1f); "
                    "zero-triple check on the spinodal run: %s",
                    std::max({std::abs(self[0]), std::abs(self[1]), std::abs(self[2])}), min_order, kRelativeOrder,
                    z.pass_k ? "pass" : "fail")});
    }

    // 7: quadratic part of the relative dissipation and the Korn constant.
    {
        const MaterialParams& m = spin.material;
        std::mt19937_64 rng(2024);
        std::uniform_real_distribution<double> U(0.0, 1.0);
        double worst_q = INFINITY;
        int q_fail = 0;
        for (int k = 0; k < kQuadraticSamples; ++k) {
            const Grid g = Grid::square(8 + int(rng() % 5), 4.0);
            TripleSpec sp;
            sp.box = {0.5, 3.5, 0.5, 3.5};
            sp.amplitude = 0.2 + 1.3 * U(rng);
            sp.frequency = 2.0 * U(rng);
            sp.stress_scale = 0.45 * U(rng);
            sp.t_support = 3.0;
            const auto ts = sample_triple(make_test_triple(sp, g, m.lambda), g, 2.5 * U(rng));
            State s = State::zero(g);
            s.phi = random_scalar(g, rng, 0.9);
            s.mu = random_scalar(g, rng);
            s.v = random_noslip(g, rng);
            s.S = (k % 3 == 0 ? 20.0 : 1.0) * random_stf(g, rng);
            const auto W = relative_dissipation(s, ts, m.gamma, m, spin.verify.weight);
            const double scale = std::abs(W.q_commutator) + W.q_weight + 1.0;
            worst_q = std::min(worst_q, W.q / scale);
            if (W.q < -kQuadraticTol * scale) ++q_fail;
        }
        double max_korn = 0.0;
        for (int k = 0; k < kKornSamples; ++k) {
            const Grid g = Grid::make(2, {4 + int(rng() % 29), 4 + int(rng() % 29), 1}, {1.0 + (rng() % 4), 2.0, 1.0});
            const KornSums s = korn_sums(random_divfree(g, rng));
            max_korn = std::max(max_korn, s.grad_sq / s.sym_sq);
        }
        const bool korn_ok = max_korn <= kKornConstant * kKornConstant * (1.0 + kKornRoundoff);
        const bool weight_ok = spin.verify.weight.korn_constant == kKornConstant;
        report({7, "nonnegative quadratic part under the regularity weight", q_fail == 0 && korn_ok && weight_ok,
                fmt("%d/%d pairs below -1e-10*scale (min q/scale %.3e); max |grad v|^2/|sym grad v|^2 = %.15f over "
                    "%d fields (limit 2)",
                    q_fail, kQuadraticSamples, worst_q, max_korn, kKornSamples)});
    }

    // 9: gamma sweep (its trajectories also feed criterion 8).
    RunConfig sweep = shear_config(work / "sweep", 32, 50);
    sweep.gammas = {1e-1, 1e-2, 1e-3, 1e-4, 0.0};
    const SweepReport sw = run_gamma_sweep(sweep);
    Outcome crit9{9, "gamma-uniform energy bound (shear-yield 32^2, 50 steps, forced)", false, ""};
    {
        bool completed = sw.members.size() == sweep.gammas.size();
        std::string dist;
        for (const auto& m : sw.members) {
            completed = completed && m.run.status == "completed";
            dist += fmt(" %g:%.2e", m.gamma, m.distance_max);
        }
        double worst_margin = INFINITY;
        for (const auto& m : sw.members) worst_margin = std::min(worst_margin, m.bound - m.run.sup_e_tot);
        crit9.pass = completed && sw.all_bounded;
        crit9.detail = fmt("all bounded: %s, min(bound - sup E) %.3e; distance to gamma=0 (reported):",
                           sw.all_bounded ? "yes" : "no", worst_margin) +
                       dist + (sw.distance_monotone ? " decreasing" : " not monotone");
    }

    // 8: weight monotonicity over every stored trajectory/triple pair.
    {
        std::vector<Pairing> pairs;
        pairs.push_back(check_pair("spinodal/default", spin, run.trajectory, spin.verify.triple));
        TripleSpec zero = spin.verify.triple;
        zero.amplitude = 0.0;
        pairs.push_back(check_pair("spinodal/zero", spin, run.trajectory, zero));
        for (std::size_t i = 0; i < sw.members.size(); ++i) {
            RunConfig c = sweep;
            c.material.gamma = sw.members[i].gamma;
            pairs.push_back(check_pair(fmt("sweep gamma %g", c.material.gamma), c, sw.members[i].run.trajectory,
                                       sweep.verify.triple));
        }
        int passing = 0, violated = 0;
        for (const auto& p : pairs) {
            if (p.pass_k) ++passing;
            if (p.pass_k && !p.pass_2k) ++violated;
        }
        report({8, "weight monotonicity (pass with K implies pass with 2K)", passing > 0 && violated == 0,
                fmt("%zu pairs, %d pass with K, %d of those fail with 2K", pairs.size(), passing, violated)});
    }
    report(crit9);

    // 10: determinism.
    {
        RunConfig a = shear_config(work / "determinism_a", 32, 20);
        RunConfig b = a;
        b.output.dir = (work / "determinism_b").string();
        run_simulation(a);
        run_simulation(b);
        bool same = true;
        std::size_t bytes = 0;
        for (const char* f : {"run.csv", "diagnostics.csv", "verify.csv"}) {
            const std::string x = slurp(fs::path(a.output.dir) / f), y = slurp(fs::path(b.output.dir) / f);
            same = same && !x.empty() && x == y;
            bytes += x.size();
        }
        report({10, "byte-identical CSV across two invocations", same,
                fmt("run.csv, diagnostics.csv, verify.csv: %zu bytes, %s", bytes, same ? "identical" : "DIFFERENT")});
    }

    std::sort(out.begin(), out.end(), [](const Outcome& x, const Outcome& y) { return x.id < y.id; });
    int failed = 0;
    for (const auto& o : out) failed += o.pass ? 0 : 1;
    std::printf("summary: %zu criteria, %d passed, %d failed\n", out.size(), int(out.size()) - failed, failed);
    return failed == 0 ? 0 : 1;
}
