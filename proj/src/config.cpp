#include "mcns/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "json.hpp"
#include "mcns/errors.hpp"
#include "mcns/hermite.hpp"
#include "mcns/profiles.hpp"

namespace mcns {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& s) {
    bool q = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') q = !q;
        if (s[i] == '#' && !q) return s.substr(0, i);
    }
    return s;
}

std::string unquote(const std::string& v) {
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) {
        cur = trim(cur);
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

}  // namespace

// ---- key/value file ----

KeyValueFile KeyValueFile::parse(const std::string& text, const std::string& source) {
    KeyValueFile f;
    f.source_ = source;
    std::istringstream is(text);
    std::string line, section;
    int ln = 0;
    while (std::getline(is, line)) {
        ++ln;
        std::string s = trim(strip_comment(line));
        if (s.empty()) continue;
        auto where = [&] { return source + " line " + std::to_string(ln); };
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError(where() + ": malformed section header '" + s + "'");
            section = trim(s.substr(1, s.size() - 2));
            if (section.empty()) throw ConfigError(where() + ": empty section name");
            continue;
        }
        auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError(where() + ": expected key = value, got '" + s + "'");
        std::string key = trim(s.substr(0, eq));
        std::string val = unquote(trim(s.substr(eq + 1)));
        if (key.empty()) throw ConfigError(where() + ": missing key");
        std::string full = section.empty() ? key : section + "." + key;
        if (f.entries_.count(full)) throw ConfigError(where() + ": duplicate key '" + full + "'");
        f.entries_[full] = {val, ln};
    }
    return f;
}

KeyValueFile KeyValueFile::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

void KeyValueFile::set_override(const std::string& a) {
    auto eq = a.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + a + "': expected key=value");
    std::string key = trim(a.substr(0, eq));
    if (key.find('.') == std::string::npos) throw ConfigError("override '" + a + "': key must be section.key");
    entries_[key] = {unquote(trim(a.substr(eq + 1))), 0};
}

// ---- schema ----

const std::vector<std::string>& known_config_keys() {
    static const std::vector<std::string> keys = {
        "grid.n",           "grid.L",
        "params.epsilon",   "params.eta",          "params.c",
        "initial.preset",   "initial.amplitude",   "initial.shift",        "initial.snapshot", "initial.t0",
        "solver.dt",        "solver.t_end",        "solver.dealias",       "solver.duhamel_rule",
        "solver.picard_iters", "solver.nonlinear", "solver.snapshots",     "solver.divergence_factor",
        "analysis.n",       "analysis.window",     "analysis.norms",       "analysis.trajectory",
        "profiles.quantities", "profiles.times",   "profiles.r_max",       "profiles.points",
        "output.dir",       "run.threads",
    };
    return keys;
}

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {"zero",          "gaussian-rho",     "gaussian-a",
                                                   "curl-gaussian-omega", "shifted-gaussian", "custom-snapshot"};
    return names;
}

namespace {

class Reader {
public:
    explicit Reader(const KeyValueFile& kv) : kv_(kv) {}

    const KeyValueFile::Entry* find(const std::string& key) const {
        auto it = kv_.entries().find(key);
        return it == kv_.entries().end() ? nullptr : &it->second;
    }
    [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
        const auto* e = find(key);
        std::string where = kv_.source();
        if (e && e->line > 0) where += " line " + std::to_string(e->line);
        else if (e) where += " (override)";
        throw ConfigError(where + ": field " + key + ": " + msg);
    }

    double num(const std::string& key, double def) const {
        const auto* e = find(key);
        if (!e) return def;
        return parse_num(key, e->value);
    }
    double parse_num(const std::string& key, const std::string& v) const {
        if (v == "inf") return kInf;
        try {
            std::size_t pos = 0;
            double d = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument("trailing");
            return d;
        } catch (const std::exception&) {
            fail(key, "expected a number, got '" + v + "'");
        }
    }
    int integer(const std::string& key, int def) const {
        const auto* e = find(key);
        if (!e) return def;
        try {
            std::size_t pos = 0;
            int d = std::stoi(e->value, &pos);
            if (pos != e->value.size()) throw std::invalid_argument("trailing");
            return d;
        } catch (const std::exception&) {
            fail(key, "expected an integer, got '" + e->value + "'");
        }
    }
    bool boolean(const std::string& key, bool def) const {
        const auto* e = find(key);
        if (!e) return def;
        if (e->value == "true") return true;
        if (e->value == "false") return false;
        fail(key, "expected true or false, got '" + e->value + "'");
    }
    std::string str(const std::string& key, const std::string& def) const {
        const auto* e = find(key);
        return e ? e->value : def;
    }
    std::vector<double> nums(const std::string& key, const std::vector<double>& def) const {
        const auto* e = find(key);
        if (!e) return def;
        std::vector<double> out;
        for (const auto& p : split(e->value, ',')) out.push_back(parse_num(key, p));
        return out;
    }

private:
    const KeyValueFile& kv_;
};

}  // namespace

std::vector<double> parse_snapshot_spec(const std::string& spec, double dt, double t_end) {
    std::vector<double> out;
    if (spec.empty()) return {t_end};
    if (spec.rfind("log:", 0) == 0) {
        auto parts = split(spec.substr(4), ':');
        if (parts.size() != 3) throw ConfigError("snapshot spec '" + spec + "': expected log:lo:hi:count");
        out = log_snapshot_times(std::stod(parts[0]), std::stod(parts[1]), std::stoi(parts[2]), dt);
    } else {
        for (const auto& p : split(spec, ',')) out.push_back(std::lround(std::stod(p) / dt) * dt);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

ExperimentConfig build_config(const KeyValueFile& kv) {
    const auto& known = known_config_keys();
    for (const auto& [k, e] : kv.entries())
        if (std::find(known.begin(), known.end(), k) == known.end()) {
            std::string where = kv.source() + (e.line > 0 ? " line " + std::to_string(e.line) : " (override)");
            throw ConfigError(where + ": unknown key '" + k + "'");
        }
    Reader R(kv);
    ExperimentConfig c;
    c.n = R.integer("grid.n", c.n);
    c.L = R.num("grid.L", c.L);
    if (c.n < 8 || c.n % 2) R.fail("grid.n", "must be an even integer >= 8");
    if (!(c.L > 0.0)) R.fail("grid.L", "must be > 0");

    c.epsilon = R.num("params.epsilon", c.epsilon);
    c.eta = R.num("params.eta", c.eta);
    c.c = R.num("params.c", c.c);
    if (!(c.epsilon > 0.0)) R.fail("params.epsilon", "must be > 0");
    if (!(c.eta > 0.0)) R.fail("params.eta", "must be > 0");
    if (!(c.c > 0.0)) R.fail("params.c", "must be > 0");

    c.preset = R.str("initial.preset", c.preset);
    if (std::find(preset_names().begin(), preset_names().end(), c.preset) == preset_names().end())
        R.fail("initial.preset", "unknown preset '" + c.preset + "'");
    c.amplitude = R.num("initial.amplitude", c.amplitude);
    if (!(c.amplitude > 0.0)) R.fail("initial.amplitude", "must be > 0");
    auto sh = R.nums("initial.shift", {c.shift[0], c.shift[1], c.shift[2]});
    if (sh.size() != 3) R.fail("initial.shift", "expected three comma-separated numbers");
    c.shift = {sh[0], sh[1], sh[2]};
    c.snapshot = R.str("initial.snapshot", "");
    if (c.preset == "custom-snapshot" && c.snapshot.empty())
        R.fail("initial.snapshot", "required for preset custom-snapshot");
    c.t0 = R.num("initial.t0", 0.0);
    if (c.t0 < 0.0) R.fail("initial.t0", "must be >= 0");

    SolverConfig& s = c.solver;
    s.dt = R.num("solver.dt", s.dt);
    if (!(s.dt > 0.0)) R.fail("solver.dt", "must be > 0");
    s.t_end = R.num("solver.t_end", s.t_end);
    if (!(s.t_end >= s.dt)) R.fail("solver.t_end", "must be >= solver.dt");
    s.dealias = R.boolean("solver.dealias", s.dealias);
    try {
        s.duhamel_rule = parse_duhamel_rule(R.str("solver.duhamel_rule", "etd-heun"));
    } catch (const ConfigError& e) {
        R.fail("solver.duhamel_rule", e.what());
    }
    s.picard_iters = R.integer("solver.picard_iters", s.picard_iters);
    s.nonlinear = R.boolean("solver.nonlinear", s.nonlinear);
    s.divergence_factor = R.num("solver.divergence_factor", s.divergence_factor);
    c.snapshots_spec = R.str("solver.snapshots", "");
    try {
        s.snapshot_times = parse_snapshot_spec(c.snapshots_spec, s.dt, s.t_end);
        s.validate();
    } catch (const ConfigError& e) {
        R.fail("solver.snapshots", e.what());
    } catch (const std::exception& e) {
        R.fail("solver.snapshots", std::string("cannot parse: ") + e.what());
    }

    c.n_weight = R.num("analysis.n", c.n_weight);
    if (!(c.n_weight >= 0.0 && c.n_weight <= 2.0)) R.fail("analysis.n", "must lie in [0,2]");
    auto w = R.nums("analysis.window", {c.window_lo, c.window_hi});
    if (w.size() != 2 || !(w[1] > w[0]) || w[0] < 0.0) R.fail("analysis.window", "expected lo, hi with 0 <= lo < hi");
    c.window_lo = w[0];
    c.window_hi = w[1];
    if (const auto* e = R.find("analysis.norms")) {
        c.norms.clear();
        for (const auto& item : split(e->value, ',')) {
            auto pm = split(item, ':');
            if (pm.size() < 1 || pm.size() > 2) R.fail("analysis.norms", "expected p[:mu] items, got '" + item + "'");
            NormSpec ns;
            ns.p = R.parse_num("analysis.norms", pm[0]);
            ns.mu = pm.size() == 2 ? R.parse_num("analysis.norms", pm[1]) : 0.0;
            try {
                ns.validate();
            } catch (const Error& err) {
                R.fail("analysis.norms", err.what());
            }
            c.norms.push_back(ns);
        }
        if (c.norms.empty()) R.fail("analysis.norms", "empty list");
    }
    c.trajectory_dir = R.str("analysis.trajectory", "");

    if (const auto* e = R.find("profiles.quantities")) {
        c.profiles.quantities = split(e->value, ',');
        for (const auto& q : c.profiles.quantities)
            if (std::find(profile_names().begin(), profile_names().end(), q) == profile_names().end())
                R.fail("profiles.quantities", "unknown quantity '" + q + "'");
    }
    c.profiles.times = R.nums("profiles.times", c.profiles.times);
    for (double t : c.profiles.times)
        if (t < 0.0) R.fail("profiles.times", "times must be >= 0");
    c.profiles.r_max = R.num("profiles.r_max", c.profiles.r_max);
    c.profiles.points = R.integer("profiles.points", c.profiles.points);
    if (c.profiles.points < 1) R.fail("profiles.points", "must be >= 1");

    c.out_dir = R.str("output.dir", c.out_dir);
    c.threads = R.integer("run.threads", c.threads);
    if (c.threads < 1) R.fail("run.threads", "must be >= 1");
    return c;
}

std::string ExperimentConfig::to_json() const {
    nlohmann::ordered_json j;
    j["grid"] = {{"n", n}, {"L", L}};
    j["params"] = {{"epsilon", epsilon}, {"eta", eta}, {"c", c}, {"nu", 0.5 * (epsilon + eta)}};
    j["initial"] = {{"preset", preset}, {"amplitude", amplitude}, {"shift", {shift[0], shift[1], shift[2]}},
                    {"snapshot", snapshot}, {"t0", t0}};
    j["solver"] = {{"dt", solver.dt},
                   {"t_end", solver.t_end},
                   {"dealias", solver.dealias},
                   {"duhamel_rule", to_string(solver.duhamel_rule)},
                   {"picard_iters", solver.picard_iters},
                   {"nonlinear", solver.nonlinear},
                   {"divergence_factor", solver.divergence_factor},
                   {"snapshots", snapshots_spec},
                   {"snapshot_times", solver.snapshot_times}};
    nlohmann::ordered_json norms_j = nlohmann::ordered_json::array();
    for (const NormSpec& s : norms) norms_j.push_back({{"p", std::isinf(s.p) ? nlohmann::ordered_json("inf") : nlohmann::ordered_json(s.p)}, {"mu", s.mu}});
    j["analysis"] = {{"n", n_weight}, {"window", {window_lo, window_hi}}, {"norms", norms_j},
                     {"trajectory", trajectory_dir}};
    j["profiles"] = {{"quantities", profiles.quantities},
                     {"times", profiles.times},
                     {"r_max", profiles.r_max},
                     {"points", profiles.points}};
    j["output"] = {{"dir", out_dir}};
    j["run"] = {{"threads", threads}};
    return j.dump(2);
}

void preflight_wave_wrap(const ExperimentConfig& cfg) {
    // the diffusion wave must stay off the periodic boundary for the whole run
    const double need = 2.0 * (cfg.c * cfg.solver.t_end + 10.0);
    if (cfg.L < need)
        throw ConfigError("wave-wrap preflight: box L = " + std::to_string(cfg.L) + " too small for c t_end = " +
                          std::to_string(cfg.c * cfg.solver.t_end) + " (need L >= " + std::to_string(need) + ")");
}

// ---- presets ----

// Presets are sampled pointwise from their closed forms. Spectral derivatives of a
// sampled Gaussian ring across the whole box once the grid under-resolves it, which
// breaks the face-decay requirement of the moment quadrature.
CurlDivState make_initial_state(const ExperimentConfig& cfg) {
    const GridSpec g = cfg.grid();
    const PhysicalParams p = cfg.params();
    if (cfg.preset == "custom-snapshot") {
        CurlDivState u = load_state(cfg.snapshot, p);
        if (u.grid() != g) throw ConfigError("initial.snapshot grid does not match grid.n / grid.L");
        return u;
    }
    CurlDivState u = CurlDivState::zeros(g, p);
    if (cfg.preset == "zero") return u;
    const Vec3 x0 = cfg.preset == "shifted-gaussian" ? cfg.shift : Vec3{0.0, 0.0, 0.0};
    auto at = [x0](const MultiIndex& d) {
        return [x0, d](const Vec3& x) { return gaussian_derivative(d, {x[0] - x0[0], x[1] - x0[1], x[2] - x0[2]}); };
    };
    // curl(phi e3) = (d2 phi, -d1 phi, 0)
    auto curl_e3 = [&] {
        auto d2 = at({0, 1, 0});
        auto d1 = at({1, 0, 0});
        return VectorField3::sample(g, [=](const Vec3& x) { return Vec3{d2(x), -d1(x), 0.0}; });
    };
    if (cfg.preset == "gaussian-rho") {
        u.rho = ScalarField::sample(g, at({}));
    } else if (cfg.preset == "gaussian-a") {
        // unit-mass phi0 minus a unit-mass Gaussian of doubled variance: zero total mass, still localized
        u.a = ScalarField::sample(g, [](const Vec3& x) { return phi0(x) - gaussian_derivative({}, x, 2.0); });
    } else if (cfg.preset == "curl-gaussian-omega") {
        u.omega = curl_e3();
    } else if (cfg.preset == "shifted-gaussian") {
        u.rho = ScalarField::sample(g, at({}));
        u.a = ScalarField::sample(g, at({1, 0, 0}));
        u.omega = curl_e3();
    }
    if (u.rho.rep == Rep::Physical) u.rho = forward_transform(u.rho);
    if (u.a.rep == Rep::Physical) u.a = forward_transform(u.a);
    if (u.omega.rep() == Rep::Physical) u.omega = forward_transform(u.omega);
    u *= cfg.amplitude;
    // Zero total mass exactly. On coarse grids the sampled derivatives keep an aliasing-level
    // discrete mean; removing it as a constant would leave a floor at the box faces, so it is
    // taken out with a localized Gaussian instead.
    const ScalarField G = forward_transform(ScalarField::sample(g, at({})));
    auto remove_mass = [&](ScalarField& f) {
        const cplx m = f.v[0] / G.v[0];
        if (m != cplx(0.0))
            for (std::size_t i = 0; i < f.size(); ++i) f.v[i] -= m * G.v[i];
        f.v[0] = 0.0;
    };
    remove_mass(u.a);
    for (int d = 0; d < 3; ++d) remove_mass(u.omega[d]);
    double defect = solenoidal_defect(u.omega);
    if (defect > 1e-9)
        spdlog::warn("preset {}: sampled vorticity has discrete divergence defect {:.2e} (grid under-resolves phi0)",
                     cfg.preset, defect);
    return u;
}

}  // namespace mcns
