#include <cstring>
#include <filesystem>

#include "doctest.h"
#include "helpers.hpp"
#include "mcns/config.hpp"
#include "mcns/errors.hpp"
#include "mcns/solver.hpp"

using namespace mcns;
namespace fs = std::filesystem;

namespace {

CurlDivState shifted(int n, double L, double amp) {
    ExperimentConfig cfg;
    cfg.n = n;
    cfg.L = L;
    cfg.preset = "shifted-gaussian";
    cfg.amplitude = amp;
    return make_initial_state(cfg);
}

SolverConfig sc(double dt, double t_end, bool nonlinear = true) {
    SolverConfig c;
    c.dt = dt;
    c.t_end = t_end;
    c.nonlinear = nonlinear;
    c.snapshot_times = {t_end};
    return c;
}

bool same_bits(const ScalarField& a, const ScalarField& b) {
    return a.size() == b.size() && std::memcmp(a.v.data(), b.v.data(), a.size() * sizeof(cplx)) == 0;
}

bool same_bits(const CurlDivState& a, const CurlDivState& b) {
    return same_bits(a.rho, b.rho) && same_bits(a.a, b.a) && same_bits(a.omega[0], b.omega[0]) &&
           same_bits(a.omega[1], b.omega[1]) && same_bits(a.omega[2], b.omega[2]);
}

CurlDivState linear_reference(const CurlDivState& u0, double t) {
    CurlDivState u = u0;
    std::tie(u.rho, u.a) = apply_heat_wave(u0.rho, u0.a, u0.params, t);
    u.omega = apply_heat(u0.omega, u0.params, t);
    return u;
}

}  // namespace

TEST_CASE("solver config validation") {
    CHECK_THROWS_AS(sc(0.0, 1.0).validate(), ConfigError);
    CHECK_THROWS_AS(sc(0.5, 0.1).validate(), ConfigError);
    SolverConfig c = sc(0.1, 1.0);
    c.snapshot_times = {0.5, 0.3};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.snapshot_times = {1.5};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    CHECK(parse_duhamel_rule("picard") == DuhamelRule::Picard);
    CHECK(to_string(DuhamelRule::EtdHeun) == "etd-heun");
    CHECK_THROWS_AS(parse_duhamel_rule("rk4"), ConfigError);
}

TEST_CASE("log snapshot times") {
    auto t = log_snapshot_times(5.0, 40.0, 24, 0.01);
    REQUIRE(t.size() >= 20);
    CHECK(t.front() == th::approx(5.0));
    CHECK(t.back() == th::approx(40.0));
    for (std::size_t i = 1; i < t.size(); ++i) CHECK(t[i] > t[i - 1]);
    for (double x : t) CHECK(std::abs(x / 0.01 - std::round(x / 0.01)) < 1e-9);
    auto coarse = log_snapshot_times(0.1, 0.3, 50, 0.1);
    CHECK(coarse.size() == 3);
}

TEST_CASE("zero state stays zero") {
    GridSpec g(16, 24.0);
    CurlDivState z = CurlDivState::zeros(g, PhysicalParams());
    CurlDivState s = step(z, 0.1, sc(0.1, 1.0));
    CHECK(state_norm(s) == 0.0);
}

TEST_CASE("linear run reproduces the exact propagator") {
    ExperimentConfig cfg;
    cfg.n = 32;
    cfg.L = 24;
    cfg.preset = "gaussian-rho";
    CurlDivState u0 = make_initial_state(cfg);
    SolverConfig c = sc(0.05, 2.0, false);
    c.snapshot_times = {0.5, 1.0, 2.0};
    Trajectory tr = evolve(u0, c);
    REQUIRE(tr.snaps.size() == 3);
    for (const Snapshot& s : tr.snaps) CHECK(state_rel_diff(s.u, linear_reference(u0, s.t)) < 1e-12);
}

TEST_CASE("etd-heun and picard agree for small data") {
    CurlDivState u0 = shifted(32, 24.0, 1e-3);
    SolverConfig a = sc(0.01, 0.5);
    SolverConfig b = a;
    b.duhamel_rule = DuhamelRule::Picard;
    b.picard_iters = 3;
    CurlDivState ua = evolve(u0, a).snaps.back().u, ub = evolve(u0, b).snaps.back().u;
    CHECK(state_rel_diff(ua, ub) < 1e-8);
}

TEST_CASE("conservation and solenoidal invariance") {
    // h = 0.5 so the sampled curl is solenoidal to roundoff
    CurlDivState u0 = shifted(64, 32.0, 0.5);
    REQUIRE(solenoidal_defect(u0.omega) < 1e-12);
    SolverConfig c = sc(0.05, 2.0);
    c.snapshot_times = {0.5, 1.0, 1.5, 2.0};
    const cplx r0 = u0.rho.v[0];
    Trajectory tr = evolve(u0, c);
    for (const Snapshot& s : tr.snaps) {
        CHECK(std::abs(s.u.rho.v[0] - r0) <= 1e-12 * std::abs(r0));
        CHECK(s.u.a.v[0] == cplx(0, 0));
        for (int d = 0; d < 3; ++d) CHECK(s.u.omega[d].v[0] == cplx(0, 0));
        CHECK(solenoidal_defect(s.u.omega) < 1e-9);
    }
}

TEST_CASE("nonlinear part scales quadratically with amplitude") {
    std::vector<double> un;
    for (double A : {1e-4, 2e-4}) {
        CurlDivState u0 = shifted(32, 32.0, A);
        CurlDivState u = evolve(u0, sc(0.05, 2.0)).snaps.back().u;
        un.push_back(state_norm(u - linear_reference(u0, 2.0)));
    }
    CHECK(un[1] / un[0] == th::approx(4.0).epsilon(0.1));
}

TEST_CASE("divergence is reported") {
    CurlDivState u0 = shifted(16, 24.0, 1.0);
    u0.rho.v[3] = cplx(std::nan(""), 0.0);
    CHECK_THROWS_AS(evolve(u0, sc(0.1, 0.2)), DivergenceError);
    // far outside the small-data regime the explicit Duhamel rule blows up
    CurlDivState big = shifted(16, 24.0, 1e4);
    SolverConfig c = sc(0.1, 2.0);
    CHECK_THROWS_AS(evolve(big, c), DivergenceError);
}

TEST_CASE("zero-mass precondition") {
    CurlDivState u0 = shifted(16, 24.0, 1.0);
    u0.a.v[0] = 0.1;
    CHECK_THROWS_AS(evolve(u0, sc(0.1, 0.2)), ZeroMassError);
}

TEST_CASE("picard map diagnostics") {
    CurlDivState u0 = shifted(16, 24.0, 1e-2);
    GridSpec g = u0.grid();
    CurlDivState z = CurlDivState::zeros(g, u0.params);
    SolverConfig c = sc(0.05, 1.0);
    Trajectory zt;
    for (int k = 0; k <= 4; ++k) zt.snaps.push_back({k * 0.05, z});
    Trajectory fz = picard_map(zt, z, c);
    for (const auto& s : fz.snaps) CHECK(state_norm(s.u) == 0.0);

    // iterating from the linear flow contracts
    Trajectory lin;
    for (int k = 0; k <= 20; ++k) lin.snaps.push_back({k * 0.05, linear_reference(u0, k * 0.05)});
    Trajectory f1 = picard_map(lin, u0, c), f2 = picard_map(f1, u0, c);
    CHECK(trajectory_distance(f2, f1) < trajectory_distance(f1, lin));

    // residual of the computed solution shrinks with the step
    std::vector<double> res;
    for (double dt : {0.04, 0.02}) {
        SolverConfig cc = sc(dt, 0.8);
        cc.snapshot_times.clear();
        for (long k = 0; k <= cc.steps_for(0.8); ++k) cc.snapshot_times.push_back(k * dt);
        Trajectory tr = evolve(u0, cc);
        res.push_back(trajectory_distance(picard_map(tr, u0, cc), tr));
    }
    CHECK(res[1] < res[0] / 2.5);
}

TEST_CASE("decomposition identities") {
    SUBCASE("linear run has no nonlinear parts") {
        CurlDivState u0 = shifted(32, 32.0, 1.0);
        SolverConfig c = sc(0.05, 1.0, false);
        c.snapshot_times = {0.5, 1.0};
        auto d = decompose(evolve(u0, c), u0, 1.0, c);
        for (const auto& s : d) {
            CHECK(state_norm(s.u_HP) < 1e-14 * state_norm(s.u));
            CHECK(state_norm(s.u_NR) < 1e-12 * state_norm(s.u));
            CHECK(state_norm(s.u_L - s.u_H - s.u_LR) <= 1e-10 * state_norm(s.u_L));
        }
    }
    SUBCASE("hermite data leaves no linear remainder") {
        ExperimentConfig cfg;
        cfg.n = 32;
        cfg.L = 32;
        cfg.preset = "gaussian-rho";
        CurlDivState u0 = make_initial_state(cfg);
        SolverConfig c = sc(0.05, 1.0);
        c.snapshot_times = {0.25, 0.5, 1.0};
        auto d = decompose(evolve(u0, c), u0, 0.0, c);
        for (const auto& s : d) CHECK(state_norm(s.u_LR) < 1e-10 * state_norm(s.u_L));
    }
    SUBCASE("reconstruction") {
        CurlDivState u0 = shifted(32, 32.0, 0.3);
        SolverConfig c = sc(0.05, 1.0);
        c.snapshot_times = {0.5, 1.0};
        for (double n : {0.0, 1.0, 2.0}) {
            auto d = decompose(evolve(u0, c), u0, n, c);
            for (const auto& s : d) {
                CHECK(state_norm(s.u - (s.u_H + s.u_LR + s.u_HP + s.u_NR)) <= 1e-9 * state_norm(s.u));
                CHECK(state_norm(s.u_L - s.u_H - s.u_LR) <= 1e-10 * state_norm(s.u_L));
                CHECK(&s.u_app(n) == (n >= 2.0 ? &s.u_H : &s.u_L));
            }
        }
    }
}

TEST_CASE("state files round trip and resume is bit identical") {
    fs::path dir = fs::temp_directory_path() / "mcns_test_solver";
    fs::create_directories(dir);
    CurlDivState u0 = shifted(16, 24.0, 0.5);
    SolverConfig c = sc(0.05, 1.0);
    c.snapshot_times = {0.5, 1.0};
    Trajectory full = evolve(u0, c);
    save_state((dir / "mid").string(), full.snaps[0].u);
    CurlDivState mid = load_state((dir / "mid").string(), u0.params);
    CHECK(same_bits(mid, full.snaps[0].u));
    Trajectory rest = evolve(mid, c, {}, true, 0.5);
    REQUIRE(rest.snaps.size() == 1);
    CHECK(rest.snaps[0].t == 1.0);
    CHECK(same_bits(rest.snaps[0].u, full.snaps[1].u));
    // determinism
    CHECK(same_bits(evolve(u0, c).snaps[1].u, full.snaps[1].u));
    fs::remove_all(dir);
}
