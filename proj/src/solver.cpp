#include "mcns/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "mcns/errors.hpp"
#include "mcns/hermite.hpp"

namespace mcns {

namespace {

std::array<ScalarField*, 5> fields(CurlDivState& u) {
    return {&u.rho, &u.a, &u.omega[0], &u.omega[1], &u.omega[2]};
}
std::array<const ScalarField*, 5> fields(const CurlDivState& u) {
    return {&u.rho, &u.a, &u.omega[0], &u.omega[1], &u.omega[2]};
}

const char* kFieldNames[5] = {"rho", "a", "omega1", "omega2", "omega3"};

// y = x - s * z, fieldwise
void sub_scaled(CurlDivState& y, const CurlDivState& x, double s, const CurlDivState& z) {
    auto Y = fields(y);
    auto X = fields(x);
    auto Z = fields(z);
    for (int f = 0; f < 5; ++f) {
        cplx* yp = Y[f]->v.data();
        const cplx* xp = X[f]->v.data();
        const cplx* zp = Z[f]->v.data();
        const std::size_t N = Y[f]->size();
        for (std::size_t i = 0; i < N; ++i) yp[i] = xp[i] - s * zp[i];
    }
}

// y = x - s * (z + w)
void sub_scaled_sum(CurlDivState& y, const CurlDivState& x, double s, const CurlDivState& z,
                    const CurlDivState& w) {
    auto Y = fields(y);
    auto X = fields(x);
    auto Z = fields(z);
    auto W = fields(w);
    for (int f = 0; f < 5; ++f) {
        cplx* yp = Y[f]->v.data();
        const cplx* xp = X[f]->v.data();
        const cplx* zp = Z[f]->v.data();
        const cplx* wp = W[f]->v.data();
        const std::size_t N = Y[f]->size();
        for (std::size_t i = 0; i < N; ++i) yp[i] = xp[i] - s * (zp[i] + wp[i]);
    }
}

void flow_apply(const LinearFlow& E, CurlDivState& u) {
    E.apply(u.rho.v.data(), u.a.v.data(), u.omega[0].v.data(), u.omega[1].v.data(), u.omega[2].v.data());
}

double l1(const ScalarField& f) {
    double s = 0.0;
    for (const cplx& z : f.v) s += std::abs(z);
    return s;
}

void require_spectral_state(const CurlDivState& u, const char* who) {
    for (const ScalarField* f : fields(u))
        if (f->rep != Rep::Spectral) throw UsageError(std::string(who) + ": state must be spectral");
    if (u.a.grid != u.rho.grid || u.omega.grid() != u.rho.grid)
        throw UsageError(std::string(who) + ": grid mismatch inside state");
}

std::string hex_hash(const std::string& s) {
    // FNV-1a, stable across platforms
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace

// ---- config ----

void SolverConfig::validate() const {
    if (!(dt > 0.0)) throw ConfigError("solver.dt must be > 0");
    if (!(t_end >= dt)) throw ConfigError("solver.t_end must be >= solver.dt");
    if (picard_iters < 1) throw ConfigError("solver.picard_iters must be >= 1");
    if (!(divergence_factor > 1.0)) throw ConfigError("solver.divergence_factor must be > 1");
    for (std::size_t i = 0; i < snapshot_times.size(); ++i) {
        double t = snapshot_times[i];
        if (t < 0.0 || t > t_end * (1.0 + 1e-12))
            throw ConfigError("snapshot time " + std::to_string(t) + " outside [0, t_end]");
        if (i > 0 && !(t > snapshot_times[i - 1])) throw ConfigError("snapshot times must be strictly increasing");
    }
}

long SolverConfig::steps_for(double t) const { return std::lround(t / dt); }

std::string SolverConfig::describe() const {
    std::ostringstream os;
    os.precision(17);
    os << "dt=" << dt << " t_end=" << t_end << " dealias=" << dealias << " rule=" << to_string(duhamel_rule)
       << " picard_iters=" << picard_iters << " nonlinear=" << nonlinear << " snapshots=";
    for (double t : snapshot_times) os << t << ",";
    return os.str();
}

DuhamelRule parse_duhamel_rule(const std::string& s) {
    if (s == "etd-heun") return DuhamelRule::EtdHeun;
    if (s == "picard") return DuhamelRule::Picard;
    throw ConfigError("unknown duhamel_rule '" + s + "' (expected etd-heun or picard)");
}

std::string to_string(DuhamelRule r) { return r == DuhamelRule::EtdHeun ? "etd-heun" : "picard"; }

std::vector<double> log_snapshot_times(double lo, double hi, int n, double dt) {
    if (!(lo > 0.0) || !(hi > lo) || n < 2 || !(dt > 0.0))
        throw UsageError("log_snapshot_times: need 0 < lo < hi, n >= 2, dt > 0");
    std::vector<double> out;
    for (int i = 0; i < n; ++i) {
        double t = lo * std::pow(hi / lo, double(i) / (n - 1));
        double r = std::lround(t / dt) * dt;
        if (out.empty() || r > out.back()) out.push_back(r);
    }
    return out;
}

double state_norm(const CurlDivState& u) {
    double s = 0.0;
    for (const ScalarField* f : fields(u)) s += std::pow(l2_coeff_norm(*f), 2);
    return std::sqrt(s);
}

double state_rel_diff(const CurlDivState& a, const CurlDivState& b) {
    double num = 0.0;
    auto A = fields(a);
    auto B = fields(b);
    for (int f = 0; f < 5; ++f)
        for (std::size_t i = 0; i < A[f]->size(); ++i) num += std::norm(A[f]->v[i] - B[f]->v[i]);
    double den = state_norm(b);
    return den == 0.0 ? std::sqrt(num) : std::sqrt(num) / den;
}

// ---- integrator ----

Integrator::Integrator(const GridSpec& g, const PhysicalParams& p, const SolverConfig& cfg)
    : grid_(g), params_(p), cfg_(cfg), flow_(g, p, cfg.dt),
      engine_(std::make_unique<NonlinearEngine>(g, cfg.dealias)), eu_(CurlDivState::zeros(g, p)),
      eq0_(CurlDivState::zeros(g, p)), q1_(CurlDivState::zeros(g, p)) {}

void Integrator::apply_flow(CurlDivState& u) const { flow_apply(flow_, u); }

void Integrator::q_eval(const CurlDivState& u, CurlDivState& out) {
    std::fill(out.rho.v.begin(), out.rho.v.end(), cplx(0.0));
    const cplx* om[3] = {u.omega[0].v.data(), u.omega[1].v.data(), u.omega[2].v.data()};
    cplx* cn[3] = {out.omega[0].v.data(), out.omega[1].v.data(), out.omega[2].v.data()};
    engine_->compute_Q(u.a.v.data(), om, out.a.v.data(), cn);
}

void Integrator::step(CurlDivState& u) {
    eu_ = u;
    apply_flow(eu_);
    if (!cfg_.nonlinear) {
        std::swap(u, eu_);
        return;
    }
    const double dt = cfg_.dt;
    q_eval(u, eq0_);
    apply_flow(eq0_);
    // predictor: endpoint integrand frozen at its propagated left value
    sub_scaled(u, eu_, dt, eq0_);
    const int iters = cfg_.duhamel_rule == DuhamelRule::Picard ? cfg_.picard_iters : 1;
    for (int it = 0; it < iters; ++it) {
        q_eval(u, q1_);
        sub_scaled_sum(u, eu_, 0.5 * dt, eq0_, q1_);
    }
}

void Integrator::arm_divergence_check(const CurlDivState& u0) {
    auto F = fields(u0);
    double total = 0.0;
    for (int f = 0; f < 5; ++f) total += (ref_[f] = l1(*F[f]));
    for (int f = 0; f < 5; ++f)
        if (ref_[f] == 0.0) ref_[f] = total;
}

void Integrator::check(const CurlDivState& u, double t) const {
    auto F = fields(u);
    for (int f = 0; f < 5; ++f) {
        double s = l1(*F[f]);
        if (!std::isfinite(s))
            throw DivergenceError("non-finite value in " + std::string(kFieldNames[f]) + " at t = " +
                                      std::to_string(t), t);
        // spectral l1 bounds the grid max-norm
        if (ref_[f] > 0.0 && s > cfg_.divergence_factor * ref_[f])
            throw DivergenceError(std::string(kFieldNames[f]) + " grew beyond " +
                                      std::to_string(cfg_.divergence_factor) + "x its initial size at t = " +
                                      std::to_string(t), t);
    }
}

CurlDivState step(const CurlDivState& u, double dt, const SolverConfig& cfg) {
    require_spectral_state(u, "step");
    SolverConfig c = cfg;
    c.dt = dt;
    if (!(dt > 0.0)) throw ConfigError("step: dt must be > 0");
    Integrator I(u.grid(), u.params, c);
    CurlDivState out = u;
    I.step(out);
    I.arm_divergence_check(u);
    I.check(out, dt);
    return out;
}

Trajectory evolve(const CurlDivState& u0, const SolverConfig& cfg, const SnapshotCallback& cb, bool keep,
                  double t_start) {
    cfg.validate();
    require_spectral_state(u0, "evolve");
    for (int d = -1; d < 3; ++d) {
        const ScalarField& f = d < 0 ? u0.a : u0.omega[d];
        check_zero_mass(f, "evolve");
    }
    Integrator I(u0.grid(), u0.params, cfg);
    I.arm_divergence_check(u0);
    I.check(u0, t_start);

    std::ostringstream prov;
    prov.precision(17);
    prov << cfg.describe() << " n=" << u0.grid().n() << " L=" << u0.grid().L() << " eps=" << u0.params.epsilon
         << " eta=" << u0.params.eta << " c=" << u0.params.c;
    Trajectory traj;
    traj.provenance = hex_hash(prov.str());

    const long k0 = cfg.steps_for(t_start), K = cfg.steps_for(cfg.t_end);
    std::vector<long> snap_steps;
    for (double t : cfg.snapshot_times) {
        long k = cfg.steps_for(t);
        if (k > k0 || (k == k0 && k0 == 0)) snap_steps.push_back(k);
    }
    std::size_t next = 0;
    auto emit = [&](long k, const CurlDivState& u) {
        double t = k * cfg.dt;
        if (cb) cb(t, u);
        if (keep) traj.snaps.push_back({t, u});
    };
    CurlDivState u = u0;
    while (next < snap_steps.size() && snap_steps[next] == k0) {
        emit(k0, u);
        ++next;
    }
    for (long k = k0 + 1; k <= K; ++k) {
        I.step(u);
        I.check(u, k * cfg.dt);
        while (next < snap_steps.size() && snap_steps[next] == k) {
            emit(k, u);
            ++next;
        }
    }
    return traj;
}

Trajectory picard_map(const Trajectory& traj, const CurlDivState& u0, const SolverConfig& cfg) {
    if (traj.snaps.empty()) throw UsageError("picard_map: empty trajectory");
    if (traj.snaps.front().t != 0.0) throw UsageError("picard_map: trajectory must start at t = 0");
    const GridSpec& g = u0.grid();
    Integrator I(g, u0.params, cfg);
    std::map<double, LinearFlow> flows;
    Trajectory out;
    out.provenance = traj.provenance + "+F";
    CurlDivState F = u0;
    CurlDivState qk = CurlDivState::zeros(g, u0.params), qn = qk;
    if (cfg.nonlinear) I.q_eval(traj.snaps[0].u, qk);
    out.snaps.push_back({0.0, F});
    for (std::size_t k = 0; k + 1 < traj.snaps.size(); ++k) {
        double h = traj.snaps[k + 1].t - traj.snaps[k].t;
        if (!(h > 0.0)) throw UsageError("picard_map: snapshot times must increase");
        auto it = flows.find(h);
        if (it == flows.end()) it = flows.emplace(h, LinearFlow(g, u0.params, h)).first;
        flow_apply(it->second, F);
        if (cfg.nonlinear) {
            flow_apply(it->second, qk);
            I.q_eval(traj.snaps[k + 1].u, qn);
            sub_scaled_sum(F, F, 0.5 * h, qk, qn);
            std::swap(qk, qn);
        }
        out.snaps.push_back({traj.snaps[k + 1].t, F});
    }
    return out;
}

double trajectory_distance(const Trajectory& a, const Trajectory& b) {
    if (a.snaps.size() != b.snaps.size()) throw UsageError("trajectory_distance: size mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < a.snaps.size(); ++i) d = std::max(d, state_rel_diff(a.snaps[i].u, b.snaps[i].u));
    return d;
}

// ---- decomposition ----

Decomposer::Decomposer(const CurlDivState& u0, double n, const SolverConfig& cfg)
    : u0_(u0), n_(n), cfg_(cfg), integ_(u0.grid(), u0.params, cfg) {
    require_spectral_state(u0, "Decomposer");
    floor_weight(n);
    const GridSpec& g = u0.grid();
    HypParaApprox hp = hyp_para_hermite_approx(u0.rho, u0.a, n, u0.params, 0.0);
    DivfreeApprox df = divfree_hermite_approx(u0.omega, n, u0.params, 0.0);
    uh0_ = {hp.rho_H, hp.a_H, df.omega_H, u0.params};
    hp_ = CurlDivState::zeros(g, u0.params);
    uh_ = uh0_;
    qh_ = CurlDivState::zeros(g, u0.params);
    if (cfg_.nonlinear) integ_.q_eval(uh_, qh_);
}

DecompositionSnapshot Decomposer::at(double t, const CurlDivState& u) {
    const long K = cfg_.steps_for(t);
    if (K < k_) throw UsageError("Decomposer: snapshots must be fed in increasing time order");
    const GridSpec& g = u0_.grid();
    if (cfg_.nonlinear) {
        CurlDivState eq = CurlDivState::zeros(g, u0_.params), qn = eq;
        for (; k_ < K; ++k_) {
            // v_{k+1} = E v_k - dt/2 (E Q_H(t_k) + Q_H(t_{k+1}))
            eq = qh_;
            integ_.apply_flow(eq);
            integ_.apply_flow(uh_);
            integ_.q_eval(uh_, qn);
            integ_.apply_flow(hp_);
            sub_scaled_sum(hp_, hp_, 0.5 * cfg_.dt, eq, qn);
            std::swap(qh_, qn);
        }
    } else {
        k_ = K;
    }
    LinearFlow E(g, u0_.params, K * cfg_.dt);
    DecompositionSnapshot d{K * cfg_.dt, u, u0_, uh0_, u0_, hp_, u0_};
    flow_apply(E, d.u_L);
    flow_apply(E, d.u_H);
    d.u_LR = d.u_L - d.u_H;
    d.u_NR = (u - d.u_L) - hp_;
    return d;
}

std::vector<DecompositionSnapshot> decompose(const Trajectory& traj, const CurlDivState& u0, double n,
                                             const SolverConfig& cfg) {
    Decomposer D(u0, n, cfg);
    std::vector<DecompositionSnapshot> out;
    for (const Snapshot& s : traj.snaps) out.push_back(D.at(s.t, s.u));
    return out;
}

// ---- persistence ----

void save_state(const std::string& prefix, const CurlDivState& u) {
    auto F = fields(u);
    for (int f = 0; f < 5; ++f) write_snapshot(prefix + "_" + kFieldNames[f] + ".bin", *F[f]);
}

CurlDivState load_state(const std::string& prefix, const PhysicalParams& p) {
    CurlDivState u;
    u.params = p;
    auto F = fields(u);
    for (int f = 0; f < 5; ++f) *F[f] = read_snapshot(prefix + "_" + kFieldNames[f] + ".bin");
    require_spectral_state(u, "load_state");
    return u;
}

}  // namespace mcns
