#pragma once

#include <map>
#include <string>
#include <vector>

#include "mcns/analysis.hpp"
#include "mcns/solver.hpp"

namespace mcns {

// Flat "[section] key = value" file. Every key must be known to the schema.
class KeyValueFile {
public:
    struct Entry {
        std::string value;
        int line;  // 0 for overrides
    };

    static KeyValueFile parse(const std::string& text, const std::string& source = "<config>");
    static KeyValueFile load(const std::string& path);
    void set_override(const std::string& assignment);  // "section.key=value"

    const std::map<std::string, Entry>& entries() const { return entries_; }
    const std::string& source() const { return source_; }

private:
    std::map<std::string, Entry> entries_;
    std::string source_;
};

struct ProfilesConfig {
    std::vector<std::string> quantities{"rho1", "a1", "rho2", "a2"};
    std::vector<double> times{1.0};
    double r_max = 10.0;
    int points = 101;
};

struct ExperimentConfig {
    // grid
    int n = 64;
    double L = 120.0;
    // params
    double epsilon = 1.0, eta = 1.0, c = 1.0;
    // initial data
    std::string preset = "gaussian-rho";
    double amplitude = 1.0;
    Vec3 shift{1.0, 0.0, 0.0};
    std::string snapshot;  // prefix for custom-snapshot
    double t0 = 0.0;       // start time (resume)
    // solver
    SolverConfig solver;
    std::string snapshots_spec;
    // analysis
    double n_weight = 0.0;
    double window_lo = 5.0, window_hi = 40.0;
    std::vector<NormSpec> norms{NormSpec{}};
    std::string trajectory_dir;
    // profiles subcommand
    ProfilesConfig profiles;
    // output / run
    std::string out_dir = "mcns_out";
    int threads = 1;

    GridSpec grid() const { return GridSpec(n, L); }
    PhysicalParams params() const { return PhysicalParams(epsilon, eta, c); }
    std::string to_json() const;  // fully resolved
};

ExperimentConfig build_config(const KeyValueFile& kv);
const std::vector<std::string>& known_config_keys();

// L >= 2 (c t_end + 10); throws ConfigError otherwise
void preflight_wave_wrap(const ExperimentConfig& cfg);

std::vector<double> parse_snapshot_spec(const std::string& spec, double dt, double t_end);

// presets: zero, gaussian-rho, gaussian-a, curl-gaussian-omega, shifted-gaussian, custom-snapshot
CurlDivState make_initial_state(const ExperimentConfig& cfg);
const std::vector<std::string>& preset_names();

}  // namespace mcns
