#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "helpers.hpp"
#include "mcns/errors.hpp"
#include "mcns/propagators.hpp"

using namespace mcns;
namespace fs = std::filesystem;

TEST_CASE("grid invariants") {
    CHECK_THROWS_AS(GridSpec(7, 10.0), UsageError);
    CHECK_THROWS_AS(GridSpec(6, 10.0), UsageError);
    CHECK_THROWS_AS(GridSpec(16, 0.0), UsageError);
    CHECK_THROWS_AS(GridSpec::from_axes({16, 16, 32}, {10, 10, 10}), UsageError);
    GridSpec g(16, 10.0);
    Vec3 z = g.xi_at(0);
    CHECK(z[0] == 0.0);
    CHECK(z[1] == 0.0);
    CHECK(z[2] == 0.0);
    CHECK(g.h() == th::approx(10.0 / 16));
    CHECK(g.xi(1) == th::approx(2 * M_PI / 10.0));
    CHECK(g.wavenumber(15) == -1);
    CHECK(g.coord(0) == -5.0);
}

TEST_CASE("forward transform: constant and single harmonic") {
    GridSpec g(16, 10.0);
    ScalarField one = forward_transform(ScalarField::sample(g, [](const Vec3&) { return 1.0; }));
    CHECK(std::abs(one.v[0] - 1.0) < 1e-14);
    double rest = 0.0;
    for (std::size_t i = 1; i < g.size(); ++i) rest = std::max(rest, std::abs(one.v[i]));
    CHECK(rest < 1e-14);

    const double L = g.L();
    ScalarField c = forward_transform(ScalarField::sample(g, [L](const Vec3& x) { return std::cos(2 * M_PI * x[0] / L); }));
    std::size_t ip = g.index(1, 0, 0), im = g.index(15, 0, 0);
    CHECK(std::abs(c.v[ip] - 0.5) < 1e-14);
    CHECK(std::abs(c.v[im] - 0.5) < 1e-14);
    double other = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (i != ip && i != im) other = std::max(other, std::abs(c.v[i]));
    CHECK(other < 1e-14);
}

TEST_CASE("forward transform: phi0 zero mode is the grid mean") {
    GridSpec g(64, 40.0);
    ScalarField f = ScalarField::sample(g, phi0);
    double mean = 0.0;
    for (const cplx& z : f.v) mean += z.real();
    mean /= double(g.size());
    ScalarField fh = forward_transform(f);
    CHECK(std::abs(fh.v[0].real() - mean) < 1e-15 * std::max(1.0, mean) + 1e-18);
    CHECK(std::abs(fh.v[0].real() * 40.0 * 40.0 * 40.0 - 1.0) < 1e-8);
}

TEST_CASE("inverse transform: round trip, zero field, basis mode") {
    GridSpec g(16, 7.0);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> U(-1, 1);
    ScalarField f = ScalarField::sample(g, [&](const Vec3&) { return U(rng); });
    CHECK(rel_l2_diff(inverse_transform(forward_transform(f)), f) < 1e-12);

    ScalarField z = inverse_transform(ScalarField::zeros(g, Rep::Spectral));
    CHECK(max_abs(z) == 0.0);

    ScalarField m = ScalarField::zeros(g, Rep::Spectral);
    m.real_valued = false;
    std::size_t k = g.index(2, 15, 1);
    const cplx c0(0.3, -0.7);
    m.v[k] = c0;
    ScalarField x = inverse_transform(m);
    Vec3 xi = g.xi_at(k);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        Vec3 p = g.x_at(i);
        cplx want = c0 * std::exp(cplx(0, xi[0] * p[0] + xi[1] * p[1] + xi[2] * p[2]));
        worst = std::max(worst, std::abs(x.v[i] - want));
    }
    CHECK(worst < 1e-13);
}

TEST_CASE("transforms reject the wrong representation") {
    GridSpec g(8, 1.0);
    CHECK_THROWS_AS(forward_transform(ScalarField::zeros(g, Rep::Spectral)), UsageError);
    CHECK_THROWS_AS(inverse_transform(ScalarField::zeros(g, Rep::Physical)), UsageError);
    CHECK_THROWS_AS(dealias(ScalarField::zeros(g, Rep::Physical)), UsageError);
}

TEST_CASE("apply_multiplier") {
    GridSpec g(16, 9.0);
    const double L = g.L();
    ScalarField c = forward_transform(ScalarField::sample(g, [L](const Vec3& x) { return std::cos(2 * M_PI * x[0] / L); }));
    CHECK(th::max_coeff_diff(apply_multiplier(c, [](const Vec3&) { return cplx(1.0); }), c) == 0.0);

    ScalarField d = inverse_transform(apply_multiplier(c, [](const Vec3& xi) { return cplx(0, xi[0]); }));
    ScalarField want = ScalarField::sample(g, [L](const Vec3& x) { return -(2 * M_PI / L) * std::sin(2 * M_PI * x[0] / L); });
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) worst = std::max(worst, std::abs(d.v[i] - want.v[i]));
    CHECK(worst < 1e-13);

    ScalarField h = apply_multiplier(c, [](const Vec3& xi) { return cplx(heat_multiplier(xi, 1.0, 0.0)); });
    CHECK(th::max_coeff_diff(h, c) == 0.0);

    CHECK_THROWS_AS(apply_multiplier(c, [](const Vec3& xi) { return cplx(1.0 / (xi[0] * xi[0])); }), NumericError);
}

TEST_CASE("dealias: band, top mode, products") {
    GridSpec g(32, 2 * M_PI);
    ScalarField f = th::random_band_limited(g, 1, 10, true);
    CHECK(th::max_coeff_diff(dealias(f), f) == 0.0);

    ScalarField top = ScalarField::zeros(g, Rep::Spectral);
    top.v[g.index(15, 0, 0)] = 1.0;
    CHECK(max_abs(dealias(top)) == 0.0);

    // idempotent
    ScalarField r = th::random_band_limited(g, 2, 16, true);
    CHECK(th::max_coeff_diff(dealias(dealias(r)), dealias(r)) == 0.0);

    // dealiased product on n equals the unaliased product (2n grid) restricted to the band
    ScalarField a = th::random_band_limited(g, 5, 10, true), b = th::random_band_limited(g, 6, 10, true);
    ScalarField ax = inverse_transform(a), bx = inverse_transform(b);
    ScalarField p(g, Rep::Physical);
    for (std::size_t i = 0; i < g.size(); ++i) p.v[i] = ax.v[i] * bx.v[i];
    ScalarField pd = dealias(forward_transform(p));

    GridSpec G(64, g.L());
    auto lift = [&](const ScalarField& s) {
        ScalarField o = ScalarField::zeros(G, Rep::Spectral);
        for (std::size_t i = 0; i < g.size(); ++i) {
            int u, v, w;
            g.unflatten(i, u, v, w);
            auto m = [&](int q) { int k = g.wavenumber(q); return k < 0 ? k + 64 : k; };
            o.v[G.index(m(u), m(v), m(w))] = s.v[i];
        }
        return inverse_transform(o);
    };
    ScalarField A = lift(a), B = lift(b);
    ScalarField P(G, Rep::Physical);
    for (std::size_t i = 0; i < G.size(); ++i) P.v[i] = A.v[i] * B.v[i];
    ScalarField Ph = forward_transform(P);
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        int u, v, w;
        g.unflatten(i, u, v, w);
        if (!dealias_keep(g, u, v, w)) continue;
        auto m = [&](int q) { int k = g.wavenumber(q); return k < 0 ? k + 64 : k; };
        cplx exact = Ph.v[G.index(m(u), m(v), m(w))];
        worst = std::max(worst, std::abs(pd.v[i] - exact));
        scale = std::max(scale, std::abs(exact));
    }
    CHECK(worst < 1e-12 * scale);
}

TEST_CASE("Parseval, linearity, conjugate symmetry") {
    GridSpec g(16, 5.0);
    std::mt19937 rng(11);
    std::normal_distribution<double> N;
    ScalarField f = ScalarField::sample(g, [&](const Vec3&) { return N(rng); });
    ScalarField h = ScalarField::sample(g, [&](const Vec3&) { return N(rng); });
    double mean_sq = 0.0;
    for (const cplx& z : f.v) mean_sq += std::norm(z);
    mean_sq /= double(g.size());
    ScalarField fh = forward_transform(f), hh = forward_transform(h);
    double coeff_sq = std::pow(l2_coeff_norm(fh), 2);
    CHECK(std::abs(mean_sq - coeff_sq) < 1e-10 * mean_sq);

    ScalarField lin = forward_transform(2.5 * f + h);
    CHECK(rel_l2_diff(lin, 2.5 * fh + hh) < 1e-12);
    ScalarField back = inverse_transform(2.5 * fh + hh);
    CHECK(rel_l2_diff(back, 2.5 * f + h) < 1e-12);
    CHECK(rel_l2_diff(dealias(2.5 * fh + hh), 2.5 * dealias(fh) + dealias(hh)) < 1e-12);

    CHECK(conjugate_symmetry_defect(fh) < 1e-12);
}

TEST_CASE("snapshot files") {
    fs::path dir = fs::temp_directory_path() / "mcns_test_snap";
    fs::create_directories(dir);
    GridSpec g(8, 3.0);
    ScalarField f = forward_transform(ScalarField::sample(g, [](const Vec3& x) { return x[0] * x[1] + 0.1; }));
    std::string p = (dir / "f.bin").string();
    write_snapshot(p, f);
    ScalarField r = read_snapshot(p);
    CHECK(r.grid == g);
    CHECK(r.rep == Rep::Spectral);
    CHECK(th::max_coeff_diff(r, f) == 0.0);
    CHECK(fs::file_size(p) == 4 + 4 + 4 + 8 + 1 + 16 * g.size());

    {
        std::fstream io(p, std::ios::in | std::ios::out | std::ios::binary);
        io.write("XCNS", 4);
    }
    try {
        read_snapshot(p);
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find(p) != std::string::npos);
    }
    write_snapshot(p, f);
    fs::resize_file(p, 100);
    CHECK_THROWS_AS(read_snapshot(p), FormatError);
    CHECK_THROWS_AS(read_snapshot((dir / "missing.bin").string()), FormatError);
}
