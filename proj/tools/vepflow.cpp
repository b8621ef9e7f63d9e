#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <iostream>

#include "vep/config.hpp"
#include "vep/oracles.hpp"
#include "vep/simulation.hpp"

namespace {

using namespace vep;

void print_check(const OracleCheck& c) {
    std::printf("%-4s %-52s value %.3e limit %.3e  %s\n", c.pass ? "ok" : "FAIL", c.name.c_str(), c.value, c.limit,
                c.detail.c_str());
}

void print_verify(const VerifySummary& v) {
    if (!v.ran) return;
    std::printf("verify: %s (max defect %.3e, max defect/tol %.3e at t=%g, %zu rows); with doubled weight: %s\n",
                v.pass ? "pass" : "FAIL", v.max_defect, v.max_ratio, v.worst_time, v.rows,
                v.pass_doubled ? "pass" : "FAIL");
    if (!v.report_path.empty()) std::printf("report: %s\n", v.report_path.c_str());
}

int cmd_run(const std::string& path, const std::string& restart, bool quiet) {
    const RunConfig cfg = load_config(path);
    RunOptions opt;
    if (!restart.empty()) opt.restart_from = restart;
    if (!quiet)
        opt.on_step = [](const StepReport& r) {
            std::printf("step %5d  t=%-10.6g E=%-+.10e defect=%+.3e tol=%.1e %s\n", r.step, r.time, r.energy.e_tot,
                        r.certificate.defect, r.certificate.tol, r.certificate.pass ? "" : "UNCERTIFIED");
            std::fflush(stdout);
        };
    const RunManifest m = run_simulation(cfg, opt);
    std::printf("%s: %d/%d steps certified, %.2f s\n", m.status.c_str(), m.certified_steps, m.steps_completed,
                m.wall_seconds);
    if (make_forcing(cfg.forcing))
        std::printf("forcing work %.6e, max energy excess over work %.3e\n", m.work, m.max_energy_excess);
    else
        std::printf("energy %s\n", m.energy_nonincreasing ? "nonincreasing" : "increased");
    if (m.failure_step >= 0) std::printf("failure at step %d: %s\n", m.failure_step, m.failure_message.c_str());
    print_verify(m.verify);
    std::printf("manifest: %s\n", m.manifest_path.c_str());
    const bool ok = run_succeeded(m) && (!m.verify.ran || m.verify.pass);
    return ok ? 0 : 1;
}

int cmd_sweep(const std::string& path) {
    const RunConfig cfg = load_config(path);
    const SweepReport r = run_gamma_sweep(cfg);
    bool verified = true;
    for (const auto& m : r.members) {
        std::printf("gamma %-8g %-9s sup E %.10e bound %.10e %s  distance to reference %.3e\n", m.gamma,
                    m.run.status.c_str(), m.run.sup_e_tot, m.bound, m.bounded ? "bounded" : "UNBOUNDED",
                    m.distance_max);
        if (m.run.verify.ran && !m.run.verify.pass) verified = false;
    }
    std::printf("all bounded: %s, all certified: %s, verification: %s, distance decreases with gamma: %s\n",
                r.all_bounded ? "yes" : "NO", r.all_certified ? "yes" : "NO", verified ? "pass" : "FAIL",
                r.distance_monotone ? "yes" : "no");
    std::printf("report: %s\n", r.csv_path.c_str());
    return r.all_bounded && r.all_certified && verified ? 0 : 1;
}

int cmd_verify(const std::string& path, std::string dir) {
    RunConfig cfg = load_config(path);
    if (dir.empty()) dir = cfg.output.dir;
    const VerifySummary v = verify_run_directory(cfg, dir);
    print_verify(v);
    return v.pass ? 0 : 1;
}

int cmd_check_ops(const std::string& path, int samples, std::uint64_t seed) {
    const RunConfig cfg = path.empty() ? default_config() : load_config(path);
    std::vector<OracleCheck> all;
    ProxOracleSettings ps;
    ps.samples = samples;
    ps.seed = seed;
    for (auto&& v : {prox_oracle_checks(cfg.material.plastic, ps), operator_identity_checks(seed),
                     operator_convergence_checks(), std::vector<OracleCheck>{stress_bruteforce_check(seed)}})
        all.insert(all.end(), v.begin(), v.end());
    bool ok = true;
    for (const auto& c : all) {
        print_check(c);
        ok = ok && c.pass;
    }
    return ok ? 0 : 1;
}

int cmd_export(const std::string& in, const std::string& out) {
    const State s = state_from_bundle(read_bundle(in));
    const Grid& g = s.phi.grid;
    const auto vc = center_average(s.v);
    ScalarField snorm(g);
    for (std::size_t c = 0; c < snorm.size(); ++c) snorm.v[c] = stf_norm(s.S.at(c), s.S.ncomp);
    std::vector<std::string> names{"phi", "mu", "p", "S_norm"};
    std::vector<const ScalarField*> fields{&s.phi, &s.mu, &s.p, &snorm};
    const char* vnames[] = {"vx", "vy", "vz"};
    for (int a = 0; a < g.dim; ++a) {
        names.push_back(vnames[a]);
        fields.push_back(&vc[a]);
    }
    write_columns(out, g, names, fields);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Phase-field viscoelastic-plastic two-phase flow solver"};
    app.require_subcommand(1);
    std::string config, restart, dir, input, output;
    bool quiet = false;
    int samples = 10000;
    std::uint64_t seed = 1;

    auto* run = app.add_subcommand("run", "Run one simulation");
    run->add_option("config", config, "Configuration file")->required()->check(CLI::ExistingFile);
    run->add_option("--restart", restart, "Continue from a checkpoint bundle")->check(CLI::ExistingFile);
    run->add_flag("-q,--quiet", quiet, "No per-step output");

    auto* sweep = app.add_subcommand("sweep", "Run the gamma sweep of a configuration");
    sweep->add_option("config", config, "Configuration file")->required()->check(CLI::ExistingFile);

    auto* verify = app.add_subcommand("verify", "Relative-energy check over the checkpoints of a run directory");
    verify->add_option("config", config, "Configuration file")->required()->check(CLI::ExistingFile);
    verify->add_option("--dir", dir, "Run directory (default: output.dir of the configuration)");

    auto* ops = app.add_subcommand("check-ops", "Operator, proximal-map and stress-solver oracle battery");
    ops->add_option("config", config, "Configuration file supplying the plastic parameters")
        ->check(CLI::ExistingFile);
    ops->add_option("--samples", samples, "Proximal-map samples")->check(CLI::PositiveNumber);
    ops->add_option("--seed", seed, "Random seed");

    auto* exp = app.add_subcommand("export", "Write a checkpoint as gnuplot-ready columns");
    exp->add_option("bundle", input, "Checkpoint bundle")->required()->check(CLI::ExistingFile);
    exp->add_option("output", output, "Column file")->required();

    CLI11_PARSE(app, argc, argv);
    try {
        if (*run) return cmd_run(config, restart, quiet);
        if (*sweep) return cmd_sweep(config);
        if (*verify) return cmd_verify(config, dir);
        if (*ops) return cmd_check_ops(config, samples, seed);
        if (*exp) return cmd_export(input, output);
    } catch (const AssumptionViolation& e) {
        std::cerr << "assumption violated: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
