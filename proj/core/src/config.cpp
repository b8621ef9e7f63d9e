#include "vep/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

namespace vep {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> words(const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    for (std::string w; is >> w;) out.push_back(w);
    return out;
}

struct Entry {
    std::string value;
    int line = 0;
};

class Reader {
public:
    explicit Reader(std::map<std::string, Entry> e) : entries_(std::move(e)) {}

    bool has(const std::string& key) const { return entries_.count(key) > 0; }

    void real(const std::string& key, double& out) {
        if (auto* e = take(key)) out = to_real(key, single(key, *e));
    }
    void integer(const std::string& key, int& out) {
        if (auto* e = take(key)) out = to_int(key, single(key, *e));
    }
    void unsigned64(const std::string& key, std::uint64_t& out) {
        if (auto* e = take(key)) {
            const std::string w = single(key, *e);
            auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), out);
            if (ec != std::errc() || p != w.data() + w.size()) fail(key, "expected a nonnegative integer, got '" + w + "'");
        }
    }
    void word(const std::string& key, std::string& out) {
        if (auto* e = take(key)) out = single(key, *e);
    }
    void boolean(const std::string& key, bool& out) {
        if (auto* e = take(key)) {
            const std::string w = single(key, *e);
            if (w == "true" || w == "yes" || w == "1")
                out = true;
            else if (w == "false" || w == "no" || w == "0")
                out = false;
            else
                fail(key, "expected true or false, got '" + w + "'");
        }
    }
    void reals(const std::string& key, std::vector<double>& out, std::size_t min_count, std::size_t max_count) {
        if (auto* e = take(key)) {
            const auto w = words(e->value);
            if (w.size() < min_count || w.size() > max_count)
                fail(key, "expected " + count_text(min_count, max_count) + " values, got " + std::to_string(w.size()));
            out.clear();
            for (const auto& x : w) out.push_back(to_real(key, x));
        }
    }
    void pair(const std::string& key, double& a, double& b) {
        std::vector<double> v{a, b};
        reals(key, v, 2, 2);
        a = v[0], b = v[1];
    }
    void ints(const std::string& key, std::vector<int>& out, std::size_t min_count, std::size_t max_count) {
        if (auto* e = take(key)) {
            const auto w = words(e->value);
            if (w.size() < min_count || w.size() > max_count)
                fail(key, "expected " + count_text(min_count, max_count) + " values, got " + std::to_string(w.size()));
            out.clear();
            for (const auto& x : w) out.push_back(to_int(key, x));
        }
    }
    // Real or one of the given keywords; returns the keyword or empty.
    std::string real_or(const std::string& key, double& out, const std::vector<std::string>& keywords) {
        if (auto* e = take(key)) {
            const std::string w = single(key, *e);
            for (const auto& k : keywords)
                if (w == k) return k;
            out = to_real(key, w);
        }
        return {};
    }

    void finish() const {
        for (const auto& [k, e] : entries_)
            if (!used_.count(k)) throw ConfigError(k + " (line " + std::to_string(e.line) + "): unknown key");
    }

    [[noreturn]] static void fail(const std::string& key, const std::string& what) { throw ConfigError(key + ": " + what); }

private:
    const Entry* take(const std::string& key) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return nullptr;
        used_[key] = true;
        return &it->second;
    }
    static std::string single(const std::string& key, const Entry& e) {
        const auto w = words(e.value);
        if (w.size() != 1) fail(key, "expected a single value, got '" + e.value + "'");
        return w[0];
    }
    static double to_real(const std::string& key, const std::string& w) {
        double x = 0.0;
        auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), x);
        if (ec != std::errc() || p != w.data() + w.size() || !std::isfinite(x))
            fail(key, "expected a finite number, got '" + w + "'");
        return x;
    }
    static int to_int(const std::string& key, const std::string& w) {
        int x = 0;
        auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), x);
        if (ec != std::errc() || p != w.data() + w.size()) fail(key, "expected an integer, got '" + w + "'");
        return x;
    }
    static std::string count_text(std::size_t a, std::size_t b) {
        return a == b ? std::to_string(a) : std::to_string(a) + " to " + std::to_string(b);
    }

    std::map<std::string, Entry> entries_;
    std::map<std::string, bool> used_;
};

std::map<std::string, Entry> tokenize(const std::string& text) {
    std::map<std::string, Entry> out;
    std::istringstream is(text);
    std::string raw, section;
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (s.empty()) continue;
        const std::string where = "line " + std::to_string(line);
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError(where + ": unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            if (section.empty() || section.find_first_of(" \t=") != std::string::npos)
                throw ConfigError(where + ": bad section name '" + section + "'");
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
        const std::string key = trim(s.substr(0, eq)), value = trim(s.substr(eq + 1));
        if (key.empty() || key.find_first_of(" \t") != std::string::npos)
            throw ConfigError(where + ": bad key '" + key + "'");
        if (value.empty()) throw ConfigError(where + ": empty value for '" + key + "'");
        const std::string path = section.empty() ? key : section + "." + key;
        if (out.count(path))
            throw ConfigError(path + " (line " + std::to_string(line) + "): duplicate key, first set on line " +
                              std::to_string(out[path].line));
        out[path] = {value, line};
    }
    return out;
}

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

RunConfig default_config() {
    RunConfig c;
    MaterialParams& m = c.material;
    m.rho1 = 1.0, m.rho2 = 2.0;
    m.nu = {1.0, 2.0};
    m.eta = {1.0, 0.5};
    m.lambda = 2.0, m.kappa = 2.0, m.epsilon = 1.0, m.gamma = 1e-3;
    m.plastic = {1.0, 1.0, 1e-3, 1e-3, 0.5, 0.3};
    c.initial.mean = 0.1;
    c.verify.triple.amplitude = 0.3;
    c.verify.triple.frequency = 0.5;
    c.verify.triple.box = {0.5, 7.5, 0.5, 7.5};
    c.verify.triple.t_support = c.h * c.steps;
    return c;
}

void RunConfig::validate() const {
    try {
        material.validate();
    } catch (const std::invalid_argument& e) {
        throw AssumptionViolation(e.what());
    }
    auto data = [](const std::string& m) { throw AssumptionViolation("admissible initial data violated: " + m); };
    if (!(std::abs(initial.mean) < 1.0)) data("mean of phi0 must lie in (-1, 1), got " + num(initial.mean));
    if (!(initial.noise >= 0.0)) data("initial.noise must be >= 0");
    if (initial.scenario == "shear-yield") {
        if (!(initial.band_width > 0.0 && initial.band_width < 0.5)) data("initial.band_width must lie in (0, 0.5)");
        if (!(std::abs(initial.phase_contrast) < 1.0)) data("initial.phase_contrast must lie in (-1, 1)");
        for (double s : {initial.stress_inside, initial.stress_outside})
            if (!(s >= 0.0 && s <= 1.0))
                data("shear-yield stress levels must lie in [0, 1] (the stress must start inside the yield ball)");
    } else if (initial.scenario != "spinodal" && initial.scenario != "manufactured") {
        throw ConfigError("initial.scenario: unknown scenario '" + initial.scenario +
                          "' (expected spinodal, shear-yield or manufactured)");
    }
    if (!(h > 0.0)) throw ConfigError("time.h: must be > 0");
    if (steps < 1) throw ConfigError("time.steps: must be >= 1");
    if (forcing.preset != "none" && forcing.preset != "shear")
        throw ConfigError("forcing.preset: unknown preset '" + forcing.preset + "' (expected none or shear)");
    if (forcing.preset == "shear" && !(forcing.frequency >= 0.0)) throw ConfigError("forcing.frequency: must be >= 0");
    if (!(solver.tol_outer > 0.0)) throw ConfigError("solver.tol_outer: must be > 0");
    if (!(solver.tol_lin > 0.0)) throw ConfigError("solver.tol_lin: must be > 0");
    if (solver.max_outer < 1) throw ConfigError("solver.max_outer: must be >= 1");
    if (solver.max_halvings < 0) throw ConfigError("solver.max_halvings: must be >= 0");
    if (gammas.empty()) throw ConfigError("sweep.gammas: at least one value required");
    for (double g : gammas)
        if (!(g >= 0.0)) throw AssumptionViolation("coefficient bounds violated: sweep gamma values must be >= 0");
    if (sweep_jobs < 0) throw ConfigError("sweep.jobs: must be >= 0");
    if (output.dir.empty()) throw ConfigError("output.dir: must not be empty");
    if (output.checkpoint_every < 0) throw ConfigError("output.checkpoint_every: must be >= 0");
    const bool needs_triple = verify.enabled || initial.scenario == "manufactured";
    if (needs_triple) {
        if (grid.dim != 2) throw ConfigError("verify: test triples need grid.dim = 2 (set verify.enabled = false)");
        if (material.epsilon != 1.0)
            throw ConfigError("verify: the relative-energy check needs material.epsilon = 1 (set verify.enabled = false)");
        const auto& b = verify.triple.box;
        if (!(b[0] >= 0.0 && b[0] < b[1] && b[1] <= grid.length[0] && b[2] >= 0.0 && b[2] < b[3] &&
              b[3] <= grid.length[1]))
            throw ConfigError("verify.box: support box must lie inside the domain");
        if (!(verify.triple.margin > 0.0 && verify.triple.margin < 1.0))
            throw ConfigError("verify.margin: must lie in (0, 1)");
        try {
            verify.weight.validate(material);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("verify: ") + e.what());
        }
        if (!(verify.settings.constant > 0.0)) throw ConfigError("verify.constant: must be > 0");
    }
}

RunConfig parse_config(const std::string& text) {
    Reader r(tokenize(text));
    RunConfig c = default_config();

    int dim = 2;
    std::vector<int> n{32, 32};
    std::vector<double> len{8.0, 8.0};
    r.integer("grid.dim", dim);
    if (dim != 2 && dim != 3) Reader::fail("grid.dim", "must be 2 or 3");
    r.ints("grid.n", n, 1, 3);
    r.reals("grid.length", len, 1, 3);
    auto expand = [dim](auto v, const char* key) {
        if (v.size() == 1) v.assign(dim, v[0]);
        if (int(v.size()) != dim) Reader::fail(key, "expected 1 or grid.dim values");
        return v;
    };
    n = expand(n, "grid.n");
    len = expand(len, "grid.length");
    try {
        c.grid = Grid::make(dim, {n[0], n[1], dim == 3 ? n[2] : 1}, {len[0], len[1], dim == 3 ? len[2] : 1.0});
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("grid: ") + e.what());
    }

    MaterialParams& m = c.material;
    r.pair("material.rho", m.rho1, m.rho2);
    r.pair("material.nu", m.nu.phase1, m.nu.phase2);
    r.pair("material.eta", m.eta.phase1, m.eta.phase2);
    r.real("material.lambda", m.lambda);
    r.real("material.kappa", m.kappa);
    r.real("material.epsilon", m.epsilon);
    r.real("material.gamma", m.gamma);
    r.pair("plastic.a", m.plastic.a1, m.plastic.a2);
    r.pair("plastic.b", m.plastic.b1, m.plastic.b2);
    r.pair("plastic.sigma", m.plastic.sigma1, m.plastic.sigma2);

    r.real("time.h", c.h);
    r.integer("time.steps", c.steps);
    r.unsigned64("run.seed", c.seed);

    r.word("initial.scenario", c.initial.scenario);
    r.real("initial.mean", c.initial.mean);
    r.real("initial.noise", c.initial.noise);
    r.real("initial.band_width", c.initial.band_width);
    r.real("initial.phase_contrast", c.initial.phase_contrast);
    r.real("initial.stress_inside", c.initial.stress_inside);
    r.real("initial.stress_outside", c.initial.stress_outside);

    r.word("forcing.preset", c.forcing.preset);
    r.real("forcing.amplitude", c.forcing.amplitude);
    r.real("forcing.frequency", c.forcing.frequency);

    r.real("solver.tol_outer", c.solver.tol_outer);
    r.integer("solver.max_outer", c.solver.max_outer);
    r.real("solver.tol_lin", c.solver.tol_lin);
    r.integer("solver.max_halvings", c.solver.max_halvings);

    r.reals("sweep.gammas", c.gammas, 1, 64);
    r.integer("sweep.jobs", c.sweep_jobs);

    r.word("output.dir", c.output.dir);
    r.integer("output.checkpoint_every", c.output.checkpoint_every);

    VerifySpec& v = c.verify;
    v.triple.box = {len[0] / 16, len[0] * 15 / 16, len[1] / 16, len[1] * 15 / 16};
    r.boolean("verify.enabled", v.enabled);
    r.word("verify.family", v.triple.family);
    r.real("verify.amplitude", v.triple.amplitude);
    std::vector<double> box(v.triple.box.begin(), v.triple.box.end());
    r.reals("verify.box", box, 4, 4);
    std::copy(box.begin(), box.end(), v.triple.box.begin());
    r.real("verify.frequency", v.triple.frequency);
    double ts = 0.0;
    const std::string tkey = r.real_or("verify.t_support", ts, {"auto", "none"});
    if (tkey == "none")
        v.triple.t_support = -1.0;
    else if (tkey == "auto" || !r.has("verify.t_support"))
        v.triple.t_support = c.h * c.steps;
    else if (!(ts > 0.0))
        Reader::fail("verify.t_support", "must be > 0, auto or none");
    else
        v.triple.t_support = ts;
    r.real("verify.velocity_scale", v.triple.velocity_scale);
    r.real("verify.phase_scale", v.triple.phase_scale);
    r.real("verify.stress_scale", v.triple.stress_scale);
    r.real("verify.margin", v.triple.margin);
    r.real("verify.constant", v.settings.constant);
    r.real("verify.korn_constant", v.weight.korn_constant);
    r.real("verify.nu1", v.weight.nu1);
    r.real("verify.multiplier", v.weight.multiplier);

    r.finish();
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open configuration file");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config(ss.str());
    } catch (const AssumptionViolation& e) {
        throw AssumptionViolation(path + ": " + e.what());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

std::string canonical_config(const RunConfig& c) {
    std::ostringstream os;
    auto kv = [&](const std::string& k, const std::string& v) { os << k << " = " << v << "\n"; };
    auto two = [](double a, double b) { return num(a) + " " + num(b); };
    const Grid& g = c.grid;
    os << "[grid]\n";
    kv("dim", std::to_string(g.dim));
    std::string ns, ls;
    for (int a = 0; a < g.dim; ++a) {
        ns += (a ? " " : "") + std::to_string(g.n[a]);
        ls += (a ? " " : "") + num(g.length[a]);
    }
    kv("n", ns);
    kv("length", ls);
    const MaterialParams& m = c.material;
    os << "[material]\n";
    kv("rho", two(m.rho1, m.rho2));
    kv("nu", two(m.nu.phase1, m.nu.phase2));
    kv("eta", two(m.eta.phase1, m.eta.phase2));
    kv("lambda", num(m.lambda));
    kv("kappa", num(m.kappa));
    kv("epsilon", num(m.epsilon));
    kv("gamma", num(m.gamma));
    os << "[plastic]\n";
    kv("a", two(m.plastic.a1, m.plastic.a2));
    kv("b", two(m.plastic.b1, m.plastic.b2));
    kv("sigma", two(m.plastic.sigma1, m.plastic.sigma2));
    os << "[time]\n";
    kv("h", num(c.h));
    kv("steps", std::to_string(c.steps));
    os << "[run]\n";
    kv("seed", std::to_string(c.seed));
    os << "[initial]\n";
    kv("scenario", c.initial.scenario);
    kv("mean", num(c.initial.mean));
    kv("noise", num(c.initial.noise));
    kv("band_width", num(c.initial.band_width));
    kv("phase_contrast", num(c.initial.phase_contrast));
    kv("stress_inside", num(c.initial.stress_inside));
    kv("stress_outside", num(c.initial.stress_outside));
    os << "[forcing]\n";
    kv("preset", c.forcing.preset);
    kv("amplitude", num(c.forcing.amplitude));
    kv("frequency", num(c.forcing.frequency));
    os << "[solver]\n";
    kv("tol_outer", num(c.solver.tol_outer));
    kv("max_outer", std::to_string(c.solver.max_outer));
    kv("tol_lin", num(c.solver.tol_lin));
    kv("max_halvings", std::to_string(c.solver.max_halvings));
    os << "[sweep]\n";
    std::string gs;
    for (std::size_t i = 0; i < c.gammas.size(); ++i) gs += (i ? " " : "") + num(c.gammas[i]);
    kv("gammas", gs);
    kv("jobs", std::to_string(c.sweep_jobs));
    os << "[output]\n";
    kv("dir", c.output.dir);
    kv("checkpoint_every", std::to_string(c.output.checkpoint_every));
    const VerifySpec& v = c.verify;
    os << "[verify]\n";
    kv("enabled", v.enabled ? "true" : "false");
    kv("family", v.triple.family);
    kv("amplitude", num(v.triple.amplitude));
    kv("box", num(v.triple.box[0]) + " " + num(v.triple.box[1]) + " " + num(v.triple.box[2]) + " " +
                  num(v.triple.box[3]));
    kv("frequency", num(v.triple.frequency));
    kv("t_support", v.triple.t_support > 0.0 ? num(v.triple.t_support) : "none");
    kv("velocity_scale", num(v.triple.velocity_scale));
    kv("phase_scale", num(v.triple.phase_scale));
    kv("stress_scale", num(v.triple.stress_scale));
    kv("margin", num(v.triple.margin));
    kv("constant", num(v.settings.constant));
    kv("korn_constant", num(v.weight.korn_constant));
    kv("nu1", num(v.weight.nu1));
    kv("multiplier", num(v.weight.multiplier));
    return os.str();
}

std::string config_hash(const RunConfig& cfg) {
    RunConfig c = cfg;
    c.output.dir.clear();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : canonical_config(c)) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Forcing make_forcing(const ForcingSpec& f) {
    if (f.preset == "none" || f.amplitude == 0.0) return nullptr;
    const double A = f.amplitude, w = f.frequency;
    return [A, w](const Grid& g, double t0, double t1) {
        const double tw = w == 0.0 ? 1.0 : (std::sin(w * t1) - std::sin(w * t0)) / (w * (t1 - t0));
        const double Ly = g.length[1];
        VectorField out(g);
        for_each_index(face_layout(g, 0), [&](const std::array<int, 3>& m, std::size_t i) {
            out.c[0][i] = A * tw * std::sin(std::numbers::pi * node_coord(g, 1, m[1], false) / Ly);
        });
        out.enforce_no_slip();
        return out;
    };
}

}  // namespace vep
