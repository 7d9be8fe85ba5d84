#pragma once

#include <cmath>
#include <random>

#include "doctest.h"

#include "mcns/fourier.hpp"
#include "mcns/hermite.hpp"
#include "mcns/vector_calculus.hpp"

namespace th {

using namespace mcns;

// doctest's Approx adds 1 to the scale; this one is purely relative
inline doctest::Approx approx(double x) { return doctest::Approx(x).scale(0.0); }

inline double norm3(const Vec3& x) { return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]); }

// real, band-limited to |k_i| <= kmax, zero mean unless keep_mean
inline ScalarField random_band_limited(const GridSpec& g, unsigned seed, int kmax = 4, bool keep_mean = false) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> N(0.0, 1.0);
    ScalarField f = ScalarField::zeros(g, Rep::Spectral);
    for (std::size_t i = 0; i < g.size(); ++i) {
        int a, b, c;
        g.unflatten(i, a, b, c);
        if (std::abs(g.wavenumber(a)) > kmax || std::abs(g.wavenumber(b)) > kmax || std::abs(g.wavenumber(c)) > kmax)
            continue;
        f.v[i] = cplx(N(rng), N(rng));
    }
    // enforce conjugate symmetry
    for (std::size_t i = 0; i < g.size(); ++i) {
        std::size_t j = g.negate(i);
        if (j < i) continue;
        if (j == i) f.v[i] = f.v[i].real();
        else f.v[j] = std::conj(f.v[i]);
    }
    if (!keep_mean) f.v[0] = 0.0;
    return f;
}

inline VectorField3 random_vector(const GridSpec& g, unsigned seed, int kmax = 4) {
    return {random_band_limited(g, seed, kmax), random_band_limited(g, seed + 101, kmax),
            random_band_limited(g, seed + 202, kmax)};
}

inline double max_coeff_diff(const ScalarField& a, const ScalarField& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a.v[i] - b.v[i]));
    return d;
}

inline double vnorm(const VectorField3& v) {
    double s = 0.0;
    for (int d = 0; d < 3; ++d) s += std::pow(l2_coeff_norm(v[d]), 2);
    return std::sqrt(s);
}

inline double vdiff(const VectorField3& a, const VectorField3& b) { return vnorm(a - b); }

inline double vmax_diff(const VectorField3& a, const VectorField3& b) {
    double d = 0.0;
    for (int k = 0; k < 3; ++k) d = std::max(d, max_coeff_diff(a[k], b[k]));
    return d;
}

}  // namespace th
