#include "doctest.h"
#include "frozen_values.hpp"
#include "helpers.hpp"
#include "mcns/analysis.hpp"
#include "mcns/errors.hpp"

using namespace mcns;

namespace {

std::vector<std::pair<double, double>> synth(const std::function<double(double)>& f) {
    std::vector<std::pair<double, double>> s;
    for (double t : log_snapshot_times(5.0, 40.0, 24, 0.01)) s.push_back({t, f(t)});
    return s;
}

}  // namespace

TEST_CASE("rate lattice") {
    for (const auto& c : frozen::kRateLattice) {
        RateArgs a{c.n, c.p, c.mu, c.alpha, c.k};
        CAPTURE(c.name);
        CAPTURE(c.n);
        CAPTURE(c.p);
        CHECK(rate(c.name, a) == doctest::Approx(c.value).epsilon(1e-13).scale(1.0));
    }
}

TEST_CASE("rate examples") {
    for (double p : {1.0, 1.2, 1.5}) CHECK(rates::r(0, p) == 0.0);
    CHECK(rates::r(0, kInf) == th::approx(1.0));
    CHECK(rates::ell_tilde(1, 2, 0) == th::approx(1.0));
    CHECK(rates::b(0, 1) == th::approx(1.0 / 6));
    CHECK_THROWS_AS(rates::ell(2.5, 2, 0), DomainError);
    CHECK_THROWS_AS(rates::b(1, 0.5), DomainError);
    CHECK_THROWS_AS(rate("zeta", RateArgs{}), UsageError);
}

TEST_CASE("rate continuity across breakpoints") {
    const double d = 1e-9;
    for (double n : {0.0, 0.5, 1.0, 2.0}) {
        for (double mu : {0.0, 0.5, 1.0}) {
            if (mu > n) continue;
            CHECK(std::abs(rates::ell(n, 1.5 - d, mu) - rates::ell(n, 1.5 + d, mu)) <= 1e-6);
            CHECK(std::abs(rates::ell_tilde(n, 1.5 - d, mu) - rates::ell_tilde(n, 1.5 + d, mu)) <= 1e-6);
        }
        for (int a = 0; a <= 2; ++a) CHECK(std::abs(rates::r(a, 1.5 - d) - rates::r(a, 1.5 + d)) <= 1e-6);
        for (double P : {1.5, 2.0}) {
            CHECK(std::abs(rates::b(n, P - d) - rates::b(n, P + d)) <= 1e-6);
            CHECK(std::abs(rates::frak_b(n, P - d) - rates::frak_b(n, P + d)) <= 1e-6);
        }
        for (int a = 0; a <= 1; ++a) CHECK(std::abs(rates::ell_hat(1, 2 - d, a) - rates::ell_hat(1, 2 + d, a)) <= 1e-6);
        for (double p : {1.0, 1.3, 1.5, 2.0, 3.0, 7.0, kInf})
            CHECK(rates::bb(n, p) >= rates::b(n, p));
    }
}

TEST_CASE("weighted norms of phi0") {
    GridSpec g(64, 40.0);
    ScalarField f = ScalarField::sample(g, phi0);
    NormSpec l1;
    l1.p = 1;
    CHECK(weighted_norm(f, l1) == th::approx(1.0).epsilon(1e-8));
    CHECK(weighted_norm(f, NormSpec{}) == th::approx(frozen::kPhi0L2).epsilon(1e-8));
    CHECK(weighted_norm(forward_transform(f), NormSpec{}) == th::approx(frozen::kPhi0L2).epsilon(1e-8));
    // |x| has a kink at the origin node; the grid sum converges like h^4, so extrapolate over h, h/2
    NormSpec hom = l1;
    hom.mu = 1;
    double coarse = weighted_norm(f, hom);
    double fine = weighted_norm(ScalarField::sample(GridSpec(128, 40.0), phi0), hom);
    CHECK(coarse == th::approx(frozen::kPhi0L1HomMu1).epsilon(1e-3));
    CHECK((16 * fine - coarse) / 15 == th::approx(frozen::kPhi0L1HomMu1).epsilon(1e-6));
    NormSpec inf;
    inf.p = kInf;
    CHECK(weighted_norm(f, inf) == th::approx(frozen::kPhi0AtOrigin).epsilon(1e-12));
    VectorField3 v(f, 2.0 * f, f);
    CHECK(weighted_norm(v, l1) == th::approx(2.0).epsilon(1e-8));
    NormSpec bad;
    bad.p = 0.5;
    CHECK_THROWS_AS(weighted_norm(f, bad), DomainError);
}

TEST_CASE("weighted norm interpolation and monotonicity") {
    GridSpec g(16, 10.0);
    for (unsigned s = 0; s < 20; ++s) {
        ScalarField f = inverse_transform(th::random_band_limited(g, 500 + s, 5));
        for (double p : {1.0, 1.5, 2.0, 3.0}) {
            NormSpec a, b, c;
            a.p = b.p = c.p = p;
            a.mu = 1.0;
            b.mu = 2.0;
            double lhs = weighted_norm(f, a);
            double rhs = std::pow(weighted_norm(f, b), 0.5) * std::pow(weighted_norm(f, c), 0.5);
            CHECK(lhs <= rhs * (1 + 1e-9));
        }
        ScalarField outer = f;
        for (std::size_t i = 0; i < g.size(); ++i)
            if (th::norm3(g.x_at(i)) < 1.0) outer.v[i] = 0.0;
        double prev = 0.0;
        for (double mu : {0.0, 0.5, 1.0, 1.5, 2.0}) {
            NormSpec n;
            n.mu = mu;
            double v = weighted_norm(outer, n);
            CHECK(v >= prev);
            prev = v;
        }
    }
}

TEST_CASE("initial energy") {
    GridSpec g(64, 40.0);
    PhysicalParams p;
    CurlDivState z = CurlDivState::zeros(g, p);
    CHECK(initial_energy(z, 1.0) == 0.0);
    CurlDivState u = z;
    u.rho = forward_transform(ScalarField::sample(g, phi0));
    // L^1 of d_i phi0 sees the kink of |x_i| on a grid plane: O(h^2), so extrapolate
    GridSpec g2(128, 40.0);
    CurlDivState u2 = CurlDivState::zeros(g2, p);
    u2.rho = forward_transform(ScalarField::sample(g2, phi0));
    double e1 = initial_energy(u, 0.0), e2 = initial_energy(u2, 0.0);
    CHECK(e1 == th::approx(frozen::kEnergyPhi0N0).epsilon(0.02));
    CHECK((4 * e2 - e1) / 3 == th::approx(frozen::kEnergyPhi0N0).epsilon(1e-4));
    // the sup sits at p = 1 here: the sampled sum decreases along the p lattice
    double prev = 1e300;
    for (double q : {1.0, 9.0 / 8, 5.0 / 4, 11.0 / 8, 1.5}) {
        NormSpec s;
        s.p = q;
        double v = weighted_norm(u.rho, s);
        for (int d = 0; d < 3; ++d) {
            NormSpec sd = s;
            sd.derivative = MultiIndex{d == 0, d == 1, d == 2};
            v += weighted_norm(u.rho, sd);
        }
        CHECK(v < prev);
        prev = v;
    }
    u.a = th::random_band_limited(g, 7, 3);
    u.omega = curl(th::random_vector(g, 8, 3));
    double e = initial_energy(u, 1.0);
    u *= 3.0;
    CHECK(initial_energy(u, 1.0) == th::approx(3.0 * e).epsilon(1e-12));
}

TEST_CASE("decay fits") {
    DecayFit f = fit_decay(synth([](double t) { return std::pow(t, -0.75); }), 5.0, 40.0);
    CHECK(f.slope == th::approx(-0.75).epsilon(1e-10));
    CHECK(f.r_squared == th::approx(1.0));
    CHECK(f.samples >= 20);
    DecayFit k = fit_decay(synth([](double) { return 3.0; }), 5.0, 40.0);
    CHECK(std::abs(k.slope) < 1e-12);
    DecayFit lg = fit_decay(synth([](double t) { return std::log(1 + t) / t; }), 5.0, 40.0, true);
    CHECK(lg.log_factor_flag);
    CHECK(lg.slope == th::approx(-1.0).epsilon(0.02));
    DecayFit nolog = fit_decay(synth([](double t) { return std::log(1 + t) / t; }), 5.0, 40.0, false);
    CHECK(nolog.slope > -0.8);

    auto s = synth([](double t) { return 1.0 / t; });
    CHECK_THROWS_AS(fit_decay(s, 100.0, 200.0), UsageError);
    CHECK_THROWS_AS(fit_decay(s, 5.0, 5.5), DataError);
    s[3].second = 0.0;
    CHECK_THROWS_AS(fit_decay(s, 5.0, 40.0), DataError);
}

TEST_CASE("first-moment data decays faster in L1") {
    GridSpec g(64, 120.0);
    ScalarField u0 = forward_transform(ScalarField::sample(g, [](const Vec3& x) {
        return gaussian_derivative({1, 0, 0}, x);
    }));
    NormSpec l1;
    l1.p = 1;
    std::vector<std::pair<double, double>> s;
    for (double t : log_snapshot_times(5.0, 40.0, 20, 0.01)) s.push_back({t, weighted_norm(apply_heat(u0, 1.0, t), l1)});
    CHECK(fit_decay(s, 5.0, 40.0).slope <= -0.45);
}

TEST_CASE("predicted slopes") {
    CHECK(predicted_slope("rho_H", 0, 2, 0, 0) == th::approx(-0.75));
    CHECK(predicted_slope("omega", 0, 2, 0, 0) == th::approx(-(rates::r(0, 2) + rates::ell_tilde(0, 2, 0))));
    CHECK(predicted_slope("omega_err", 1, 2, 0, 0) - predicted_slope("omega", 1, 2, 0, 0) == th::approx(-0.5));
    CHECK(predicted_slope("a_err", 1, 2, 0, 0) - predicted_slope("a", 1, 2, 0, 0) == th::approx(-0.5));
    CHECK_THROWS_AS(predicted_slope("m_H", 0, 2, 0, 0), UsageError);
}

TEST_CASE("report rows: vacuous zero fields, margins, csv") {
    GridSpec g(32, 96.0);  // heat width reaches 9 at t = 40; smaller boxes wrap and flatten the fit
    PhysicalParams p;
    std::vector<DecompositionSnapshot> d;
    for (double t : log_snapshot_times(5.0, 40.0, 20, 0.01)) {
        DecompositionSnapshot s;
        s.t = t;
        CurlDivState z = CurlDivState::zeros(g, p);
        s.u = z;
        s.u.rho = heat_profile(g, {0, 0, 0}, 2.0, t);
        s.u_L = s.u_H = s.u;
        s.u_LR = s.u_HP = s.u_NR = z;
        d.push_back(s);
    }
    TheoryReport rep = theory_report(d, 0.0, {NormSpec{}}, 5.0, 40.0);
    bool saw_rho = false;
    for (const ReportRow& r : rep.rows) {
        CHECK(r.quantity.find("_err") == std::string::npos);
        if (r.quantity.rfind("rho", 0) != 0 || r.quantity == "rho_LR" || r.quantity == "rho_HP" ||
            r.quantity == "rho_N" || r.quantity == "rho_NR")
            CHECK(r.verdict == "vacuous");
        if (r.quantity == "rho") {
            saw_rho = true;
            CHECK(r.verdict != "vacuous");
            CHECK(r.margin == th::approx(r.predicted - r.slope));
            CHECK(r.slope == th::approx(-0.72).epsilon(0.03));
        }
    }
    CHECK(saw_rho);
    CHECK(rep.csv().rfind("quantity,p,mu,alpha,window_lo,window_hi,slope,predicted,margin,pass\n", 0) == 0);
    CHECK_THROWS_AS(theory_report(d, 0.0, {NormSpec{}}, 100.0, 200.0), UsageError);
}
