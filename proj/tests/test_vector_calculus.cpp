#include "doctest.h"
#include "helpers.hpp"
#include "mcns/errors.hpp"
#include "mcns/hermite.hpp"
#include "mcns/vector_calculus.hpp"

using namespace mcns;

namespace {

double inner(const VectorField3& u, const VectorField3& v) {
    double s = 0.0;
    for (int d = 0; d < 3; ++d)
        for (std::size_t i = 0; i < u[d].size(); ++i) s += (std::conj(u[d].v[i]) * v[d].v[i]).real();
    return s;
}

ScalarField gaussian_hat(const GridSpec& g) { return forward_transform(ScalarField::sample(g, phi0)); }

}  // namespace

TEST_CASE("divergence and curl identities") {
    GridSpec g(16, 2 * M_PI);
    VectorField3 v = th::random_vector(g, 3);
    CHECK(max_abs(divergence(curl(v))) < 1e-12);

    VectorField3 konst = VectorField3::zeros(g, Rep::Spectral);
    konst[0].v[0] = 1.7;
    konst[2].v[0] = -0.3;
    CHECK(max_abs(divergence(konst)) == 0.0);

    ScalarField f = th::random_band_limited(g, 5);
    CHECK(th::vnorm(curl(gradient(f))) < 1e-12);

    // curl curl = grad div - laplacian
    VectorField3 lhs = curl(curl(v));
    VectorField3 rhs = gradient(divergence(v)) - VectorField3(laplacian(v[0]), laplacian(v[1]), laplacian(v[2]));
    CHECK(th::vdiff(lhs, rhs) < 1e-10 * th::vnorm(lhs));
}

TEST_CASE("divergence of a Gaussian gradient is its Laplacian") {
    GridSpec g(32, 20.0);
    ScalarField p = gaussian_hat(g);
    CHECK(th::max_coeff_diff(divergence(gradient(p)), laplacian(p)) < 1e-16);
    ScalarField lap = laplacian(p);
    std::size_t k = g.index(2, 1, 0);
    Vec3 xi = g.xi_at(k);
    CHECK(std::abs(lap.v[k] + (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]) * p.v[k]) < 1e-18);
}

TEST_CASE("curl of phi0 e3 matches the sampled table profile") {
    GridSpec g(48, 24.0);
    VectorField3 m = VectorField3::zeros(g, Rep::Spectral);
    m[2] = gaussian_hat(g);
    VectorField3 w = inverse_transform(curl(m));
    Table1Profile prof = table1_profiles({1, 1, 0}, 1);
    REQUIRE_FALSE(prof.zero);
    VectorField3 ref = VectorField3::sample(g, prof.f);
    double worst = 0.0, scale = 0.0;
    for (int d = 0; d < 3; ++d) {
        worst = std::max(worst, th::max_coeff_diff(w[d], ref[d]));
        scale = std::max(scale, max_abs(ref[d]));
    }
    CHECK(worst < 1e-10 * scale);
}

TEST_CASE("pi_op inverts gradient-divergence") {
    GridSpec g(32, 20.0);
    ScalarField p = gaussian_hat(g);
    ScalarField a = laplacian(p);
    VectorField3 grad = gradient(p);
    grad[0].v[0] = grad[1].v[0] = grad[2].v[0] = 0.0;
    VectorField3 pa = pi_op(a);
    CHECK(th::vdiff(pa, grad) < 1e-10 * th::vnorm(grad));
    CHECK(th::vnorm(curl(pa)) < 1e-12 * th::vnorm(pa));
    CHECK(rel_l2_diff(divergence(pa), a) < 1e-10);
}

TEST_CASE("zero-mass guard") {
    GridSpec g(16, 10.0);
    ScalarField a = th::random_band_limited(g, 9, 3, true);
    a.v[0] = 0.5;
    CHECK_THROWS_AS(pi_op(a), ZeroMassError);
    CHECK_THROWS_AS(check_zero_mass(a, "a"), ZeroMassError);
    VectorField3 w = curl(th::random_vector(g, 10));
    w[1].v[0] = 1e-3;
    CHECK_THROWS_AS(biot_savart(w), ZeroMassError);
    a.v[0] = 0.0;
    CHECK_NOTHROW(check_zero_mass(a, "a"));
}

TEST_CASE("biot_savart inverts curl on solenoidal fields") {
    GridSpec g(16, 9.0);
    VectorField3 v = project_solenoidal(th::random_vector(g, 11));
    VectorField3 w = curl(v);
    VectorField3 bw = biot_savart(w);
    CHECK(th::vdiff(bw, v) < 1e-10 * th::vnorm(v));
    CHECK(max_abs(divergence(bw)) < 1e-12);
    CHECK(th::vdiff(curl(bw), w) < 1e-10 * th::vnorm(w));
}

TEST_CASE("momentum reconstruction") {
    GridSpec g(16, 7.0);
    VectorField3 m = th::random_vector(g, 12);
    ScalarField a = divergence(m);
    VectorField3 w = curl(m);
    CHECK(th::vdiff(momentum(a, w), m) < 1e-10 * th::vnorm(m));
    ScalarField za = ScalarField::zeros(g, Rep::Spectral);
    VectorField3 zw = VectorField3::zeros(g, Rep::Spectral);
    CHECK(th::vmax_diff(momentum(za, w), biot_savart(w)) == 0.0);
    CHECK(th::vmax_diff(momentum(a, zw), pi_op(a)) == 0.0);
}

TEST_CASE("Riesz bound, Helmholtz orthogonality, commutation with heat") {
    GridSpec g(16, 11.0);
    for (unsigned s = 0; s < 10; ++s) {
        ScalarField a = th::random_band_limited(g, 100 + s, 6);
        VectorField3 pa = pi_op(a);
        double worst = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                ScalarField di = apply_multiplier(pa[j], [&](const Vec3& xi) { return cplx(0, xi[i]); });
                worst = std::max(worst, l2_coeff_norm(di) / l2_coeff_norm(a));
            }
        CHECK(worst <= 1.0 + 1e-8);
        VectorField3 bw = biot_savart(curl(th::random_vector(g, 200 + s)));
        CHECK(std::abs(inner(pa, bw)) < 1e-10 * th::vnorm(pa) * th::vnorm(bw));

        PhysicalParams p(0.8, 1.3, 1.2);
        VectorField3 h1 = pi_op(apply_heat(a, p.nu, 1.5));
        VectorField3 h0 = pi_op(a);
        for (int d = 0; d < 3; ++d) CHECK(th::max_coeff_diff(h1[d], apply_heat(h0[d], p.nu, 1.5)) < 1e-12);
        ScalarField r = th::random_band_limited(g, 300 + s, 6);
        auto [rr, aa] = apply_heat_wave(r, a, p, 0.9);
        VectorField3 lhs = pi_op(aa);
        auto [pr, pa2] = apply_heat_wave(r, ScalarField::zeros(g, Rep::Spectral), p, 0.9);
        (void)rr;
        (void)pr;
        // a-component of G_W on (r, a) is linear: -w_tt r + w_t a; Pi acts on each piece
        VectorField3 rhs = pi_op(pa2);
        VectorField3 pa_only = pi_op(apply_heat_wave(ScalarField::zeros(g, Rep::Spectral), a, p, 0.9).second);
        CHECK(th::vdiff(lhs, rhs + pa_only) < 1e-12 * th::vnorm(lhs));
        VectorField3 bh = biot_savart(apply_heat(curl(th::random_vector(g, 400 + s)), p, 0.7));
        VectorField3 hb = apply_heat(biot_savart(curl(th::random_vector(g, 400 + s))), p, 0.7);
        CHECK(th::vdiff(bh, hb) < 1e-12 * th::vnorm(hb));
    }
}

TEST_CASE("solenoidal projection") {
    GridSpec g(16, 8.0);
    VectorField3 v = th::random_vector(g, 21);
    CHECK(solenoidal_defect(v) > 1e-3);
    VectorField3 p = project_solenoidal(v);
    CHECK(solenoidal_defect(p) < 1e-14);
    VectorField3 w = curl(v);
    CHECK(th::vmax_diff(ensure_solenoidal(w), w) == 0.0);
    CHECK(solenoidal_defect(ensure_solenoidal(v)) < 1e-14);
}

TEST_CASE("nonlinearity on a two-mode momentum field") {
    // m = (A sin(k x1), B cos(k x2), 0): a = div m, omega = curl m
    GridSpec g(32, 2 * M_PI);
    const double A = 0.7, B = -1.3, k = 2.0;
    VectorField3 m = forward_transform(VectorField3::sample(g, [&](const Vec3& x) {
        return Vec3{A * std::sin(k * x[0]), B * std::cos(k * x[1]), 0.0};
    }));
    VectorField3 N = inverse_transform(nonlinearity_N(divergence(m), curl(m)));
    VectorField3 ref = VectorField3::sample(g, [&](const Vec3& x) {
        double s1 = std::sin(k * x[0]), c1 = std::cos(k * x[0]), s2 = std::sin(k * x[1]), c2 = std::cos(k * x[1]);
        return Vec3{2 * A * A * k * s1 * c1 - A * B * k * s1 * s2, A * B * k * c1 * c2 - 2 * B * B * k * c2 * s2, 0.0};
    });
    for (int d = 0; d < 3; ++d) CHECK(th::max_coeff_diff(N[d], ref[d]) < 1e-10);
}

TEST_CASE("nonlinearity: zero, quadratic scaling, engine agreement") {
    GridSpec g(16, 9.0);
    ScalarField a = th::random_band_limited(g, 31, 3);
    VectorField3 w = curl(th::random_vector(g, 32, 3));
    ScalarField za = ScalarField::zeros(g, Rep::Spectral);
    VectorField3 zw = VectorField3::zeros(g, Rep::Spectral);
    CHECK(th::vnorm(nonlinearity_N(za, zw)) == 0.0);

    VectorField3 n1 = nonlinearity_N(a, w);
    VectorField3 n2 = nonlinearity_N(2.0 * a, 2.0 * w);
    CHECK(th::vdiff(n2, 4.0 * n1) < 1e-10 * th::vnorm(n2));

    NonlinearEngine eng(g, true);
    VectorField3 out = VectorField3::zeros(g, Rep::Spectral);
    const cplx* om[3] = {w[0].v.data(), w[1].v.data(), w[2].v.data()};
    cplx* o[3] = {out[0].v.data(), out[1].v.data(), out[2].v.data()};
    eng.compute_N(a.v.data(), om, o);
    CHECK(th::vdiff(out, n1) < 1e-13 * th::vnorm(n1));
}

TEST_CASE("q_term structure") {
    GridSpec g(16, 9.0);
    PhysicalParams p;
    CurlDivState z = CurlDivState::zeros(g, p);
    QTerm qz = q_term(z);
    CHECK(l2_coeff_norm(qz.div_N) == 0.0);
    CHECK(th::vnorm(qz.curl_N) == 0.0);

    CurlDivState s = z;
    s.rho = th::random_band_limited(g, 40, 3, true);
    s.a = th::random_band_limited(g, 41, 3);
    s.omega = curl(th::random_vector(g, 42, 3));
    QTerm q = q_term(s);
    CHECK(q.div_N.v[0] == cplx(0.0, 0.0));
    for (int d = 0; d < 3; ++d) CHECK(q.curl_N[d].v[0] == cplx(0.0, 0.0));
    CHECK(solenoidal_defect(q.curl_N) < 1e-14);
    VectorField3 N = nonlinearity_N(s.a, s.omega);
    CHECK(th::max_coeff_diff(q.div_N, divergence(N)) < 1e-14 * l2_coeff_norm(q.div_N));
}
