#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "mcns/propagators.hpp"
#include "mcns/vector_calculus.hpp"

namespace mcns {

enum class DuhamelRule { EtdHeun, Picard };

struct SolverConfig {
    double dt = 0.01;
    double t_end = 1.0;
    bool dealias = true;
    DuhamelRule duhamel_rule = DuhamelRule::EtdHeun;
    int picard_iters = 3;
    std::vector<double> snapshot_times;
    bool nonlinear = true;             // false: exact linear flow only
    double divergence_factor = 1e6;    // abort threshold relative to the initial size

    void validate() const;
    long steps_for(double t) const;    // t rounded to the dt lattice
    std::string describe() const;      // stable one-line dump, hashed into provenance
};

DuhamelRule parse_duhamel_rule(const std::string& s);
std::string to_string(DuhamelRule r);

// n log-spaced times in [lo, hi] rounded to multiples of dt, deduplicated, sorted
std::vector<double> log_snapshot_times(double lo, double hi, int n, double dt);

struct Snapshot {
    double t;
    CurlDivState u;
};

struct Trajectory {
    std::vector<Snapshot> snaps;
    std::string provenance;
};

// norms and differences on whole states (coefficient l2 over all five fields)
double state_norm(const CurlDivState& u);
double state_rel_diff(const CurlDivState& a, const CurlDivState& b);

// One exponential-integrator stepper; owns the propagator table and FFT buffers.
class Integrator {
public:
    Integrator(const GridSpec& g, const PhysicalParams& p, const SolverConfig& cfg);

    void step(CurlDivState& u);
    // (0, div N, curl N)
    void q_eval(const CurlDivState& u, CurlDivState& out);
    void apply_flow(CurlDivState& u) const;
    // reference sizes for the divergence check
    void arm_divergence_check(const CurlDivState& u0);
    void check(const CurlDivState& u, double t) const;

    const SolverConfig& config() const { return cfg_; }

private:
    GridSpec grid_;
    PhysicalParams params_;
    SolverConfig cfg_;
    LinearFlow flow_;
    std::unique_ptr<NonlinearEngine> engine_;
    CurlDivState eu_, eq0_, q1_;
    std::array<double, 5> ref_{};
};

CurlDivState step(const CurlDivState& u, double dt, const SolverConfig& cfg);

using SnapshotCallback = std::function<void(double t, const CurlDivState& u)>;

// Runs from (t_start, u_start) to cfg.t_end. Snapshots at cfg.snapshot_times >= t_start are
// passed to cb and, when keep is set, stored in the returned trajectory.
Trajectory evolve(const CurlDivState& u0, const SolverConfig& cfg, const SnapshotCallback& cb = {},
                  bool keep = true, double t_start = 0.0);

// One application of the Duhamel map on a trajectory (trapezoid over snapshot times).
Trajectory picard_map(const Trajectory& u, const CurlDivState& u0, const SolverConfig& cfg);
// max over snapshots of relative l2 distance
double trajectory_distance(const Trajectory& a, const Trajectory& b);

struct DecompositionSnapshot {
    double t;
    CurlDivState u, u_L, u_H, u_LR, u_HP, u_NR;
    // u_app: u_L for n < 2, u_H at n = 2
    const CurlDivState& u_app(double n) const { return n >= 2.0 ? u_H : u_L; }
};

// Streaming decomposition: feed snapshots in increasing time order.
class Decomposer {
public:
    Decomposer(const CurlDivState& u0, double n, const SolverConfig& cfg);
    DecompositionSnapshot at(double t, const CurlDivState& u);
    double n() const { return n_; }
    const CurlDivState& hermite_initial() const { return uh0_; }

private:
    CurlDivState u0_, uh0_;
    double n_;
    SolverConfig cfg_;
    Integrator integ_;
    long k_ = 0;                 // u_HP recursion position (steps of dt)
    CurlDivState hp_, uh_, qh_;  // u_HP(t_k), u_H(t_k), Q(u_H(t_k))
};

std::vector<DecompositionSnapshot> decompose(const Trajectory& traj, const CurlDivState& u0, double n,
                                             const SolverConfig& cfg);

// Five snapshot files <prefix>_{rho,a,omega1,omega2,omega3}.bin
void save_state(const std::string& prefix, const CurlDivState& u);
CurlDivState load_state(const std::string& prefix, const PhysicalParams& p);

}  // namespace mcns
