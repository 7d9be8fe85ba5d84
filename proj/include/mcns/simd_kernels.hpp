#pragma once

#include <complex>
#include <cstddef>

namespace mcns {

// Per-mode loops used on every time step. Each kernel has a scalar reference
// and an AVX2 (or NEON) variant; variants must agree with the reference bit
// for bit, so no FMA is used anywhere in this file.
struct Kernels {
    const char* name;
    // z[i] *= m[i]
    void (*scale_real)(std::complex<double>* z, const double* m, std::size_t n);
    // (r, a) <- (A r - B a, -C r + A a)
    void (*heat_wave_block)(std::complex<double>* r, std::complex<double>* a, const double* A,
                            const double* B, const double* C, std::size_t n);
    // z1 = m1 + i m2, z2 = m3 + i * (ignored) ->
    // p = m1^2 + i m2^2, q = m3^2 + i m1 m2, s = m1 m3 + i m2 m3
    void (*quad_products)(const std::complex<double>* z1, const std::complex<double>* z2,
                          std::complex<double>* p, std::complex<double>* q, std::complex<double>* s,
                          std::size_t n);
};

const Kernels& scalar_kernels();
// nullptr when the variant is not compiled in or the CPU lacks the feature
const Kernels* avx2_kernels();
const Kernels* neon_kernels();

// Best available variant; MCNS_SIMD=scalar in the environment forces the reference.
const Kernels& active_kernels();

}  // namespace mcns
