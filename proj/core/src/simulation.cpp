#include "vep/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <nlohmann/json.hpp>
#include <random>
#include <thread>

#ifndef VEP_VERSION
#define VEP_VERSION "unknown"
#endif

namespace fs = std::filesystem;

namespace vep {

namespace {

constexpr double kInitialMargin = 1e-3;

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

ScalarField initial_mu(const ScalarField& phi, const MaterialParams& m) {
    const ScalarField lap = laplacian_neumann(phi);
    ScalarField mu(phi.grid);
    for (std::size_t c = 0; c < phi.size(); ++c)
        mu.v[c] = -m.epsilon * lap.v[c] + w_prime(phi.v[c], m.lambda) / m.epsilon;
    return mu;
}

void set_shear(StfField& S, std::size_t c, double tau) {
    Mat3 m{};
    m[0][1] = m[1][0] = tau / std::sqrt(2.0);
    std::array<double, 5> s{};
    matrix_to_stf(S.grid.dim, m, s.data());
    S.set(c, s);
}

TestTriple verifier_triple(const RunConfig& cfg) {
    return make_test_triple(cfg.verify.triple, cfg.grid, cfg.material.lambda, &cfg.material.plastic);
}

class CsvFile {
public:
    CsvFile() = default;
    CsvFile(const std::string& path, const std::string& header) : os_(path) {
        if (!os_) throw std::runtime_error("cannot open " + path + " for writing");
        os_ << header << "\n";
    }
    void row(const std::vector<std::string>& cells) {
        if (!os_.is_open()) return;
        for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
        os_ << "\n";
        os_.flush();
    }
    void line(const std::string& s) {
        if (os_.is_open()) os_ << s << "\n";
    }

private:
    std::ofstream os_;
};

std::string checkpoint_name(int step) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "step_%06d.vepf", step);
    return buf;
}

VerifySummary write_verification(const RunConfig& cfg, const std::vector<State>& traj, const std::string& path) {
    VerifySummary v;
    if (traj.size() < 2) return v;
    const TestTriple tt = verifier_triple(cfg);
    const Forcing forcing = make_forcing(cfg.forcing);
    const double gamma = cfg.material.gamma;
    const auto rep = dissipative_inequality_check(traj, forcing, tt, gamma, cfg.material, cfg.verify.weight,
                                                  cfg.verify.settings);
    RegWeightConfig doubled = cfg.verify.weight;
    doubled.multiplier *= 2.0;
    const auto rep2 =
        dissipative_inequality_check(traj, forcing, tt, gamma, cfg.material, doubled, cfg.verify.settings);
    v.ran = true;
    v.pass = rep.pass;
    v.pass_doubled = rep2.pass;
    v.max_defect = rep.max_defect;
    v.max_ratio = rep.max_ratio;
    v.worst_time = rep.worst_time;
    v.rows = rep.rows.size();
    if (!path.empty()) {
        CsvFile csv(path, "time,lhs,rhs,defect,K_value");
        for (const auto& r : rep.rows) csv.row({num(r.time), num(r.lhs), num(r.rhs), num(r.defect), num(r.weight)});
        csv.line("# summary pass=" + std::to_string(int(v.pass)) + " pass_doubled_weight=" +
                 std::to_string(int(v.pass_doubled)) + " max_defect=" + num(v.max_defect) +
                 " max_defect_over_tol=" + num(v.max_ratio) + " worst_time=" + num(v.worst_time) +
                 " rows=" + std::to_string(v.rows));
        v.report_path = path;
    }
    return v;
}

nlohmann::ordered_json verify_json(const VerifySummary& v) {
    nlohmann::ordered_json j;
    j["ran"] = v.ran;
    j["pass"] = v.pass;
    j["pass_doubled_weight"] = v.pass_doubled;
    j["max_defect"] = v.max_defect;
    j["max_defect_over_tol"] = v.max_ratio;
    j["worst_time"] = v.worst_time;
    j["rows"] = v.rows;
    j["report"] = v.report_path;
    return j;
}

void write_manifest(const RunConfig& cfg, const RunManifest& m) {
    nlohmann::ordered_json j;
    j["config_hash"] = m.config_hash;
    j["code_version"] = m.code_version;
    j["wall_seconds"] = m.wall_seconds;
    j["status"] = m.status;
    j["steps_requested"] = m.steps_requested;
    j["start_step"] = m.start_step;
    j["steps_completed"] = m.steps_completed;
    j["config"] = m.config_copy;
    j["csv"] = m.csv_path;
    j["diagnostics"] = m.diagnostics_path;
    j["checkpoints"] = m.checkpoints;
    nlohmann::ordered_json c;
    c["certified_steps"] = m.certified_steps;
    c["all_certified"] = m.all_certified;
    c["max_defect_over_tol"] = m.max_defect_ratio;
    c["energy_nonincreasing"] = m.energy_nonincreasing;
    c["e_tot0"] = m.e_tot0;
    c["sup_e_tot"] = m.sup_e_tot;
    c["forcing_work"] = m.work;
    c["max_energy_excess"] = m.max_energy_excess;
    c["tolerance_sum"] = m.tol_sum;
    c["failure_step"] = m.failure_step;
    c["failure_message"] = m.failure_message;
    j["certificates"] = c;
    nlohmann::ordered_json t;
    const TripleSpec& ts = cfg.verify.triple;
    t["family"] = ts.family;
    t["amplitude"] = ts.amplitude;
    t["box"] = ts.box;
    t["frequency"] = ts.frequency;
    t["t_support"] = ts.t_support;
    t["velocity_scale"] = ts.velocity_scale;
    t["phase_scale"] = ts.phase_scale;
    t["stress_scale"] = ts.stress_scale;
    t["margin"] = ts.margin;
    t["korn_constant"] = cfg.verify.weight.korn_constant;
    t["nu1"] = cfg.verify.weight.resolved_nu1(cfg.material);
    t["multiplier"] = cfg.verify.weight.multiplier;
    t["tolerance_constant"] = cfg.verify.settings.constant;
    j["test_triple"] = t;
    j["verification"] = verify_json(m.verify);
    std::ofstream os(m.manifest_path);
    os << j.dump(2) << "\n";
}

}  // namespace

std::string code_version() { return VEP_VERSION; }

State make_initial_data(const RunConfig& cfg) {
    const Grid& g = cfg.grid;
    const MaterialParams& m = cfg.material;
    State s = State::zero(g);
    const InitialSpec& in = cfg.initial;
    if (in.scenario == "manufactured") {
        s = triple_state(verifier_triple(cfg), g, 0.0);
        s.p = ScalarField(g);
        return s;
    }
    if (in.scenario == "spinodal") {
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> U(-in.noise, in.noise);
        std::vector<double> noise(g.cell_count());
        double mean_noise = 0.0;
        for (auto& x : noise) {
            x = U(rng);
            mean_noise += x;
        }
        mean_noise /= double(noise.size());
        const double lim = 1.0 - kInitialMargin;
        for (std::size_t c = 0; c < noise.size(); ++c)
            s.phi.v[c] = std::clamp(in.mean + (noise[c] - mean_noise), -lim, lim);
    } else {
        const double Ly = g.length[1], half = in.band_width * Ly;
        for_each_index(cell_layout(g), [&](const std::array<int, 3>& idx, std::size_t c) {
            const double d = std::abs(node_coord(g, 1, idx[1], false) - 0.5 * Ly) - half;
            const double phi = std::clamp(in.mean + in.phase_contrast * std::tanh(d / (std::sqrt(2.0) * m.epsilon)),
                                          -1.0 + kInitialMargin, 1.0 - kInitialMargin);
            s.phi.v[c] = phi;
            const double level = d < 0.0 ? in.stress_inside : in.stress_outside;
            set_shear(s.S, c, level * plastic_effective(m.plastic, phi).sigma);
        });
    }
    s.mu = initial_mu(s.phi, m);
    return s;
}

FieldBundle state_to_bundle(const State& s) {
    FieldBundle b;
    b.grid = s.phi.grid;
    b.meta["time"] = num(s.time);
    b.meta["step"] = std::to_string(s.step);
    b.add("v", s.v);
    b.add("S", s.S);
    b.add("phi", s.phi);
    b.add("mu", s.mu);
    b.add("p", s.p);
    return b;
}

State state_from_bundle(const FieldBundle& b) {
    State s = State::zero(b.grid);
    s.v = b.vector("v");
    s.S = b.stf("S");
    s.phi = b.scalar("phi");
    s.mu = b.scalar("mu");
    s.p = b.scalar("p");
    auto meta = [&](const std::string& k) {
        auto it = b.meta.find(k);
        if (it == b.meta.end()) throw std::runtime_error("checkpoint lacks metadata '" + k + "'");
        return it->second;
    };
    s.time = std::stod(meta("time"));
    s.step = std::stoi(meta("step"));
    return s;
}

RunManifest run_simulation(const RunConfig& cfg, const RunOptions& opt) {
    cfg.validate();
    const auto wall0 = std::chrono::steady_clock::now();
    RunManifest man;
    man.config_hash = config_hash(cfg);
    man.code_version = code_version();
    man.steps_requested = cfg.steps;

    State s;
    if (opt.restart_from) {
        s = state_from_bundle(read_bundle(*opt.restart_from));
        if (s.phi.grid != cfg.grid) throw ConfigError("restart: checkpoint grid differs from grid section");
    } else {
        s = make_initial_data(cfg);
    }
    man.start_step = s.step;

    const fs::path dir(cfg.output.dir);
    CsvFile csv, diag;
    if (opt.write_files) {
        fs::create_directories(dir / "checkpoints");
        man.config_copy = (dir / "config.cfg").string();
        std::ofstream(man.config_copy) << canonical_config(cfg);
        man.csv_path = (dir / "run.csv").string();
        man.diagnostics_path = (dir / "diagnostics.csv").string();
        man.manifest_path = (dir / "manifest.json").string();
        csv = CsvFile(man.csv_path,
                      "step,time,e_kin,e_el,e_pf,e_tot,d_s,d_ch,d_sd,d_plastic,defect,mass,max_phi,max_S,iters");
        diag = CsvFile(man.diagnostics_path,
                       "step,time,tol,pass,scale,partial_kinetic,partial_stress,partial_phase_field,f_work,"
                       "plastic_integral,max_trace,max_div,ch_ratio,newton_iters,stress_iters,substeps");
    }
    auto checkpoint = [&](const State& st) {
        if (!opt.write_files) return;
        const std::string p = (dir / "checkpoints" / checkpoint_name(st.step)).string();
        write_bundle(p, state_to_bundle(st));
        man.checkpoints.push_back(p);
    };

    const bool keep = opt.keep_trajectory || cfg.verify.enabled;
    const Forcing forcing = make_forcing(cfg.forcing);
    const double E0 = energy_total(s, cfg.material).e_tot;
    man.e_tot0 = man.sup_e_tot = E0;
    man.energy_nonincreasing = true;
    man.max_energy_excess = 0.0;
    double E_prev = E0;
    if (keep) {
        man.trajectory.push_back(s);
        man.work_history.push_back(0.0);
    }
    checkpoint(s);

    man.status = "completed";
    for (int k = s.step; k < cfg.steps; ++k) {
        StepResult r;
        try {
            r = picard_time_step(s, cfg.h, cfg.material, forcing, cfg.solver);
        } catch (const std::exception& e) {
            man.status = "failed";
            man.failure_step = k + 1;
            man.failure_message = e.what();
            break;
        }
        const StepReport& rep = r.report;
        s = r.state;
        ++man.steps_completed;
        if (rep.certificate.pass) ++man.certified_steps;
        const double ratio = rep.certificate.defect / rep.certificate.tol;
        man.max_defect_ratio = man.steps_completed == 1 ? ratio : std::max(man.max_defect_ratio, ratio);
        man.work += cfg.h * rep.f_work;
        man.tol_sum += rep.certificate.tol;
        const double E = rep.energy.e_tot;
        if (E > E_prev + rep.certificate.tol) man.energy_nonincreasing = false;
        E_prev = E;
        man.sup_e_tot = std::max(man.sup_e_tot, E);
        man.max_energy_excess = std::max(man.max_energy_excess, E - E0 - man.work);

        const auto& en = rep.energy;
        const auto& d = rep.dissipation;
        csv.row({std::to_string(rep.step), num(rep.time), num(en.e_kin), num(en.e_el), num(en.e_pf), num(en.e_tot),
                 num(d.d_s), num(d.d_ch), num(d.d_sd), num(d.d_plastic), num(rep.certificate.defect), num(rep.mass),
                 num(rep.max_phi), num(rep.max_S), std::to_string(rep.outer_iters)});
        diag.row({std::to_string(rep.step), num(rep.time), num(rep.certificate.tol),
                  std::to_string(int(rep.certificate.pass)), num(rep.certificate.scale), num(rep.partial.kinetic),
                  num(rep.partial.stress), num(rep.partial.phase_field), num(rep.f_work), num(rep.plastic_integral),
                  num(rep.max_trace), num(rep.max_div), num(rep.ch_ratio), std::to_string(rep.newton_iters),
                  std::to_string(rep.stress_iters), std::to_string(rep.substeps)});
        if (keep) {
            man.trajectory.push_back(s);
            man.work_history.push_back(man.work);
        }
        const int every = cfg.output.checkpoint_every;
        if ((every > 0 && s.step % every == 0) || s.step == cfg.steps) checkpoint(s);
        if (opt.on_step) opt.on_step(rep);
    }
    if (man.status == "failed" && opt.write_files && !man.trajectory.empty()) {
        const State& last = man.trajectory.back();
        const std::string p = (dir / "checkpoints" / checkpoint_name(last.step)).string();
        if (std::find(man.checkpoints.begin(), man.checkpoints.end(), p) == man.checkpoints.end()) checkpoint(last);
    }
    man.all_certified = man.steps_completed > 0 && man.certified_steps == man.steps_completed;

    if (cfg.verify.enabled)
        man.verify = write_verification(cfg, man.trajectory, opt.write_files ? (dir / "verify.csv").string() : "");
    if (!opt.keep_trajectory && !cfg.verify.enabled) man.trajectory.clear();

    man.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
    if (opt.write_files) write_manifest(cfg, man);
    return man;
}

bool run_succeeded(const RunManifest& m) { return m.status == "completed" && m.all_certified; }

VerifySummary verify_run_directory(const RunConfig& cfg, const std::string& dir) {
    const fs::path cp = fs::path(dir) / "checkpoints";
    if (!fs::is_directory(cp)) throw std::runtime_error(cp.string() + ": no checkpoint directory");
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(cp))
        if (e.path().extension() == ".vepf") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<State> traj;
    for (const auto& f : files) traj.push_back(state_from_bundle(read_bundle(f.string())));
    if (traj.size() < 2) throw std::runtime_error(cp.string() + ": need at least two checkpoints");
    if (traj.front().phi.grid != cfg.grid) throw ConfigError("verify: checkpoint grid differs from grid section");
    return write_verification(cfg, traj, (fs::path(dir) / "verify.csv").string());
}

SweepReport run_gamma_sweep(const RunConfig& cfg) {
    cfg.validate();
    const fs::path base(cfg.output.dir);
    fs::create_directories(base);
    const std::size_t n = cfg.gammas.size();
    std::vector<RunConfig> cfgs(n, cfg);
    for (std::size_t i = 0; i < n; ++i) {
        cfgs[i].material.gamma = cfg.gammas[i];
        cfgs[i].output.dir = (base / ("gamma_" + std::to_string(i))).string();
    }
    RunOptions opt;
    opt.keep_trajectory = true;
    std::vector<RunManifest> runs(n);
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t jobs = std::min<std::size_t>(n, cfg.sweep_jobs > 0 ? std::size_t(cfg.sweep_jobs) : hw);
    for (std::size_t first = 0; first < n; first += jobs) {
        std::vector<std::future<RunManifest>> fut;
        for (std::size_t i = first; i < std::min(n, first + jobs); ++i)
            fut.push_back(std::async(std::launch::async, [&, i] { return run_simulation(cfgs[i], opt); }));
        for (std::size_t i = 0; i < fut.size(); ++i) runs[first + i] = fut[i].get();
    }

    SweepReport rep;
    std::size_t ref = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (cfg.gammas[i] < cfg.gammas[ref]) ref = i;
    rep.all_bounded = rep.all_certified = true;
    for (std::size_t i = 0; i < n; ++i) {
        SweepMember m;
        m.gamma = cfg.gammas[i];
        m.run = std::move(runs[i]);
        const double max_work = *std::max_element(m.run.work_history.begin(), m.run.work_history.end());
        m.bound = m.run.e_tot0 + std::max(0.0, max_work) + m.run.tol_sum;
        m.bounded = m.run.status == "completed" && m.run.sup_e_tot <= m.bound;
        rep.all_bounded = rep.all_bounded && m.bounded;
        rep.all_certified = rep.all_certified && run_succeeded(m.run);
        rep.members.push_back(std::move(m));
    }
    const auto& T0 = rep.members[ref].run.trajectory;
    for (auto& m : rep.members) {
        const auto& T = m.run.trajectory;
        const std::size_t len = std::min(T.size(), T0.size());
        m.distance_max = 0.0;
        for (std::size_t k = 0; k < len; ++k) {
            const double d = relative_energy(T[k], T0[k], cfg.material).total;
            m.distance_max = std::max(m.distance_max, d);
            m.distance_final = d;
        }
    }
    std::vector<const SweepMember*> order;
    for (const auto& m : rep.members) order.push_back(&m);
    std::sort(order.begin(), order.end(), [](auto a, auto b) { return a->gamma < b->gamma; });
    rep.distance_monotone = true;
    for (std::size_t i = 1; i < order.size(); ++i)
        if (order[i]->distance_max < order[i - 1]->distance_max) rep.distance_monotone = false;

    rep.csv_path = (base / "sweep.csv").string();
    CsvFile csv(rep.csv_path,
                "gamma,status,certified,e_tot0,sup_e_tot,bound,bounded,verify_pass,verify_max_defect_over_tol,"
                "distance_max,distance_final");
    for (const auto& m : rep.members)
        csv.row({num(m.gamma), m.run.status, std::to_string(int(run_succeeded(m.run))), num(m.run.e_tot0),
                 num(m.run.sup_e_tot), num(m.bound), std::to_string(int(m.bounded)),
                 std::to_string(int(m.run.verify.pass)), num(m.run.verify.max_ratio), num(m.distance_max),
                 num(m.distance_final)});
    csv.line("# summary all_bounded=" + std::to_string(int(rep.all_bounded)) +
             " all_certified=" + std::to_string(int(rep.all_certified)) +
             " distance_decreases_with_gamma=" + std::to_string(int(rep.distance_monotone)) +
             " reference_gamma=" + num(cfg.gammas[ref]));

    nlohmann::ordered_json j;
    j["config_hash"] = config_hash(cfg);
    j["code_version"] = code_version();
    j["csv"] = rep.csv_path;
    j["all_bounded"] = rep.all_bounded;
    j["all_certified"] = rep.all_certified;
    j["distance_decreases_with_gamma"] = rep.distance_monotone;
    for (const auto& m : rep.members) {
        nlohmann::ordered_json e;
        e["gamma"] = m.gamma;
        e["manifest"] = m.run.manifest_path;
        e["bounded"] = m.bounded;
        e["distance_max"] = m.distance_max;
        j["members"].push_back(e);
    }
    std::ofstream(base / "sweep.json") << j.dump(2) << "\n";
    return rep;
}

}  // namespace vep
