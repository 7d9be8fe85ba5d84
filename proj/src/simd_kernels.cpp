#include "mcns/simd_kernels.hpp"

#include <cstdlib>
#include <cstring>

#if defined(__x86_64__) || defined(_M_X64)
#define MCNS_X86 1
#include <immintrin.h>
#else
#define MCNS_X86 0
#endif

#if defined(__aarch64__)
#include <arm_neon.h>
#endif

namespace mcns {

using cd = std::complex<double>;

// ---- scalar reference ----

namespace {

void scale_real_ref(cd* z, const double* m, std::size_t n) {
    double* d = reinterpret_cast<double*>(z);
    for (std::size_t i = 0; i < n; ++i) {
        d[2 * i] = d[2 * i] * m[i];
        d[2 * i + 1] = d[2 * i + 1] * m[i];
    }
}

void heat_wave_block_ref(cd* r, cd* a, const double* A, const double* B, const double* C,
                         std::size_t n) {
    double* rd = reinterpret_cast<double*>(r);
    double* ad = reinterpret_cast<double*>(a);
    for (std::size_t i = 0; i < n; ++i) {
        for (int c = 0; c < 2; ++c) {
            double rv = rd[2 * i + c], av = ad[2 * i + c];
            rd[2 * i + c] = A[i] * rv - B[i] * av;
            ad[2 * i + c] = A[i] * av - C[i] * rv;
        }
    }
}

void quad_products_ref(const cd* z1, const cd* z2, cd* p, cd* q, cd* s, std::size_t n) {
    const double* a = reinterpret_cast<const double*>(z1);
    const double* b = reinterpret_cast<const double*>(z2);
    double* pd = reinterpret_cast<double*>(p);
    double* qd = reinterpret_cast<double*>(q);
    double* sd = reinterpret_cast<double*>(s);
    for (std::size_t i = 0; i < n; ++i) {
        double m1 = a[2 * i], m2 = a[2 * i + 1], m3 = b[2 * i];
        pd[2 * i] = m1 * m1;
        pd[2 * i + 1] = m2 * m2;
        qd[2 * i] = m3 * m3;
        qd[2 * i + 1] = m1 * m2;
        sd[2 * i] = m1 * m3;
        sd[2 * i + 1] = m2 * m3;
    }
}

const Kernels kScalar{"scalar", scale_real_ref, heat_wave_block_ref, quad_products_ref};

// ---- AVX2 ----

#if MCNS_X86

__attribute__((target("avx2"))) inline __m256d dup_pairs(const double* m) {
    // [m0, m1] -> [m0, m0, m1, m1]
    __m128d mm = _mm_loadu_pd(m);
    return _mm256_permute4x64_pd(_mm256_castpd128_pd256(mm), 0x50);
}

__attribute__((target("avx2"))) void scale_real_avx2(cd* z, const double* m, std::size_t n) {
    double* d = reinterpret_cast<double*>(z);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d v = _mm256_loadu_pd(d + 2 * i);
        _mm256_storeu_pd(d + 2 * i, _mm256_mul_pd(v, dup_pairs(m + i)));
    }
    if (i < n) scale_real_ref(z + i, m + i, n - i);
}

__attribute__((target("avx2"))) void heat_wave_block_avx2(cd* r, cd* a, const double* A,
                                                          const double* B, const double* C,
                                                          std::size_t n) {
    double* rd = reinterpret_cast<double*>(r);
    double* ad = reinterpret_cast<double*>(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d rv = _mm256_loadu_pd(rd + 2 * i);
        __m256d av = _mm256_loadu_pd(ad + 2 * i);
        __m256d Av = dup_pairs(A + i), Bv = dup_pairs(B + i), Cv = dup_pairs(C + i);
        __m256d rn = _mm256_sub_pd(_mm256_mul_pd(Av, rv), _mm256_mul_pd(Bv, av));
        __m256d an = _mm256_sub_pd(_mm256_mul_pd(Av, av), _mm256_mul_pd(Cv, rv));
        _mm256_storeu_pd(rd + 2 * i, rn);
        _mm256_storeu_pd(ad + 2 * i, an);
    }
    if (i < n) heat_wave_block_ref(r + i, a + i, A + i, B + i, C + i, n - i);
}

__attribute__((target("avx2"))) void quad_products_avx2(const cd* z1, const cd* z2, cd* p, cd* q,
                                                        cd* s, std::size_t n) {
    const double* a = reinterpret_cast<const double*>(z1);
    const double* b = reinterpret_cast<const double*>(z2);
    double* pd = reinterpret_cast<double*>(p);
    double* qd = reinterpret_cast<double*>(q);
    double* sd = reinterpret_cast<double*>(s);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d v = _mm256_loadu_pd(a + 2 * i);    // m1 m2 m1' m2'
        __m256d w = _mm256_loadu_pd(b + 2 * i);    // m3 x  m3' x'
        __m256d m3 = _mm256_movedup_pd(w);         // m3 m3 m3' m3'
        __m256d m1 = _mm256_movedup_pd(v);         // m1 m1 m1' m1'
        // q = [m3*m3, m1*m2]: blend(m3, m1) * blend(m3, m2)
        __m256d qa = _mm256_blend_pd(m3, m1, 0xA);
        __m256d qb = _mm256_blend_pd(m3, v, 0xA);
        _mm256_storeu_pd(pd + 2 * i, _mm256_mul_pd(v, v));
        _mm256_storeu_pd(qd + 2 * i, _mm256_mul_pd(qa, qb));
        _mm256_storeu_pd(sd + 2 * i, _mm256_mul_pd(v, m3));
    }
    if (i < n) quad_products_ref(z1 + i, z2 + i, p + i, q + i, s + i, n - i);
}

const Kernels kAvx2{"avx2", scale_real_avx2, heat_wave_block_avx2, quad_products_avx2};

#endif

// ---- NEON ----

#if defined(__aarch64__)

void scale_real_neon(cd* z, const double* m, std::size_t n) {
    double* d = reinterpret_cast<double*>(z);
    for (std::size_t i = 0; i < n; ++i) {
        float64x2_t v = vld1q_f64(d + 2 * i);
        vst1q_f64(d + 2 * i, vmulq_f64(v, vdupq_n_f64(m[i])));
    }
}

void heat_wave_block_neon(cd* r, cd* a, const double* A, const double* B, const double* C,
                          std::size_t n) {
    double* rd = reinterpret_cast<double*>(r);
    double* ad = reinterpret_cast<double*>(a);
    for (std::size_t i = 0; i < n; ++i) {
        float64x2_t rv = vld1q_f64(rd + 2 * i), av = vld1q_f64(ad + 2 * i);
        float64x2_t Av = vdupq_n_f64(A[i]), Bv = vdupq_n_f64(B[i]), Cv = vdupq_n_f64(C[i]);
        vst1q_f64(rd + 2 * i, vsubq_f64(vmulq_f64(Av, rv), vmulq_f64(Bv, av)));
        vst1q_f64(ad + 2 * i, vsubq_f64(vmulq_f64(Av, av), vmulq_f64(Cv, rv)));
    }
}

void quad_products_neon(const cd* z1, const cd* z2, cd* p, cd* q, cd* s, std::size_t n) {
    const double* a = reinterpret_cast<const double*>(z1);
    const double* b = reinterpret_cast<const double*>(z2);
    double* pd = reinterpret_cast<double*>(p);
    double* qd = reinterpret_cast<double*>(q);
    double* sd = reinterpret_cast<double*>(s);
    for (std::size_t i = 0; i < n; ++i) {
        float64x2_t v = vld1q_f64(a + 2 * i);
        float64x2_t m3 = vdupq_n_f64(b[2 * i]);
        vst1q_f64(pd + 2 * i, vmulq_f64(v, v));
        float64x2_t qa = {b[2 * i], a[2 * i]};
        float64x2_t qb = {b[2 * i], a[2 * i + 1]};
        vst1q_f64(qd + 2 * i, vmulq_f64(qa, qb));
        vst1q_f64(sd + 2 * i, vmulq_f64(v, m3));
    }
}

const Kernels kNeon{"neon", scale_real_neon, heat_wave_block_neon, quad_products_neon};

#endif

}  // namespace

const Kernels& scalar_kernels() { return kScalar; }

const Kernels* avx2_kernels() {
#if MCNS_X86
    static const bool ok = __builtin_cpu_supports("avx2");
    return ok ? &kAvx2 : nullptr;
#else
    return nullptr;
#endif
}

const Kernels* neon_kernels() {
#if defined(__aarch64__)
    return &kNeon;
#else
    return nullptr;
#endif
}

const Kernels& active_kernels() {
    static const Kernels* chosen = [] {
        const char* env = std::getenv("MCNS_SIMD");
        if (env && std::strcmp(env, "scalar") == 0) return &kScalar;
        if (const Kernels* k = avx2_kernels()) return k;
        if (const Kernels* k = neon_kernels()) return k;
        return &kScalar;
    }();
    return *chosen;
}

}  // namespace mcns
