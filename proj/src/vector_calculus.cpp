#include "mcns/vector_calculus.hpp"

#include <spdlog/spdlog.h>

#include <cmath>

#include "mcns/errors.hpp"
#include "mcns/simd_kernels.hpp"

namespace mcns {

namespace {

const cplx I(0.0, 1.0);

double k2_of(const Vec3& x) { return x[0] * x[0] + x[1] * x[1] + x[2] * x[2]; }

void need_spectral(const ScalarField& f, const char* who) {
    if (f.rep != Rep::Spectral) throw UsageError(std::string(who) + ": input must be spectral");
}
void need_spectral(const VectorField3& f, const char* who) {
    f.check_consistent();
    if (f.rep() != Rep::Spectral) throw UsageError(std::string(who) + ": input must be spectral");
}

void flag_complex(ScalarField& f, bool real) { f.real_valued = real; }

}  // namespace

// ---- state arithmetic ----

CurlDivState CurlDivState::zeros(const GridSpec& g, const PhysicalParams& p) {
    return {ScalarField(g, Rep::Spectral), ScalarField(g, Rep::Spectral),
            VectorField3::zeros(g, Rep::Spectral), p};
}

CurlDivState& CurlDivState::operator+=(const CurlDivState& o) {
    rho += o.rho;
    a += o.a;
    omega += o.omega;
    return *this;
}
CurlDivState& CurlDivState::operator-=(const CurlDivState& o) {
    rho -= o.rho;
    a -= o.a;
    omega -= o.omega;
    return *this;
}
CurlDivState& CurlDivState::operator*=(double s) {
    rho *= s;
    a *= s;
    omega *= s;
    return *this;
}
CurlDivState operator+(CurlDivState a, const CurlDivState& b) { return a += b; }
CurlDivState operator-(CurlDivState a, const CurlDivState& b) { return a -= b; }

// ---- linear operators ----

ScalarField divergence(const VectorField3& m) {
    need_spectral(m, "divergence");
    const GridSpec& g = m.grid();
    ScalarField out(g, Rep::Spectral);
    for (std::size_t i = 0; i < out.size(); ++i) {
        Vec3 x = g.xi_at(i);
        out.v[i] = I * (x[0] * m[0].v[i] + x[1] * m[1].v[i] + x[2] * m[2].v[i]);
    }
    flag_complex(out, m[0].real_valued && m[1].real_valued && m[2].real_valued);
    return out;
}

VectorField3 curl(const VectorField3& m) {
    need_spectral(m, "curl");
    const GridSpec& g = m.grid();
    VectorField3 out = VectorField3::zeros(g, Rep::Spectral);
    for (std::size_t i = 0; i < g.size(); ++i) {
        Vec3 x = g.xi_at(i);
        cplx a = m[0].v[i], b = m[1].v[i], c = m[2].v[i];
        out[0].v[i] = I * (x[1] * c - x[2] * b);
        out[1].v[i] = I * (x[2] * a - x[0] * c);
        out[2].v[i] = I * (x[0] * b - x[1] * a);
    }
    bool real = m[0].real_valued && m[1].real_valued && m[2].real_valued;
    for (int d = 0; d < 3; ++d) flag_complex(out[d], real);
    return out;
}

VectorField3 gradient(const ScalarField& f) {
    need_spectral(f, "gradient");
    const GridSpec& g = f.grid;
    VectorField3 out = VectorField3::zeros(g, Rep::Spectral);
    for (std::size_t i = 0; i < g.size(); ++i) {
        Vec3 x = g.xi_at(i);
        for (int d = 0; d < 3; ++d) out[d].v[i] = I * x[d] * f.v[i];
    }
    for (int d = 0; d < 3; ++d) flag_complex(out[d], f.real_valued);
    return out;
}

ScalarField laplacian(const ScalarField& f) {
    need_spectral(f, "laplacian");
    ScalarField out = f;
    for (std::size_t i = 0; i < f.size(); ++i) out.v[i] *= -k2_of(f.grid.xi_at(i));
    return out;
}

void check_zero_mass(const ScalarField& f, const char* who) {
    double norm = l2_coeff_norm(f);
    double z = std::abs(f.zero_mode());
    if (z > 1e-10 * norm)
        throw ZeroMassError(std::string(who) + ": field has nonzero mean mode |f(0)| = " + std::to_string(z));
}

VectorField3 pi_op(const ScalarField& a) {
    need_spectral(a, "pi_op");
    check_zero_mass(a, "pi_op");
    const GridSpec& g = a.grid;
    VectorField3 out = VectorField3::zeros(g, Rep::Spectral);
    for (std::size_t i = 0; i < g.size(); ++i) {
        Vec3 x = g.xi_at(i);
        double k2 = k2_of(x);
        if (k2 == 0.0) continue;
        for (int d = 0; d < 3; ++d) out[d].v[i] = -I * x[d] / k2 * a.v[i];
    }
    for (int d = 0; d < 3; ++d) flag_complex(out[d], a.real_valued);
    return out;
}

VectorField3 biot_savart(const VectorField3& omega) {
    need_spectral(omega, "biot_savart");
    for (int d = 0; d < 3; ++d) check_zero_mass(omega[d], "biot_savart");
    const GridSpec& g = omega.grid();
    VectorField3 out = VectorField3::zeros(g, Rep::Spectral);
    for (std::size_t i = 0; i < g.size(); ++i) {
        Vec3 x = g.xi_at(i);
        double k2 = k2_of(x);
        if (k2 == 0.0) continue;
        cplx a = omega[0].v[i], b = omega[1].v[i], c = omega[2].v[i];
        out[0].v[i] = I * (x[1] * c - x[2] * b) / k2;
        out[1].v[i] = I * (x[2] * a - x[0] * c) / k2;
        out[2].v[i] = I * (x[0] * b - x[1] * a) / k2;
    }
    bool real = omega[0].real_valued && omega[1].real_valued && omega[2].real_valued;
    for (int d = 0; d < 3; ++d) flag_complex(out[d], real);
    return out;
}

VectorField3 momentum(const ScalarField& a, const VectorField3& omega) {
    if (a.grid != omega.grid()) throw UsageError("momentum: grid mismatch");
    return pi_op(a) + biot_savart(omega);
}

double solenoidal_defect(const VectorField3& omega) {
    need_spectral(omega, "solenoidal_defect");
    const GridSpec& g = omega.grid();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        Vec3 x = g.xi_at(i);
        cplx d = x[0] * omega[0].v[i] + x[1] * omega[1].v[i] + x[2] * omega[2].v[i];
        double mag = std::sqrt(std::norm(omega[0].v[i]) + std::norm(omega[1].v[i]) + std::norm(omega[2].v[i]));
        num = std::max(num, std::abs(d));
        den = std::max(den, std::sqrt(k2_of(x)) * mag);
    }
    return den == 0.0 ? 0.0 : num / den;
}

VectorField3 project_solenoidal(const VectorField3& omega) {
    need_spectral(omega, "project_solenoidal");
    const GridSpec& g = omega.grid();
    VectorField3 out = omega;
    for (std::size_t i = 0; i < g.size(); ++i) {
        Vec3 x = g.xi_at(i);
        double k2 = k2_of(x);
        if (k2 == 0.0) continue;
        cplx d = (x[0] * omega[0].v[i] + x[1] * omega[1].v[i] + x[2] * omega[2].v[i]) / k2;
        for (int c = 0; c < 3; ++c) out[c].v[i] -= x[c] * d;
    }
    return out;
}

VectorField3 ensure_solenoidal(const VectorField3& omega, double tol) {
    double d = solenoidal_defect(omega);
    if (d <= tol) return omega;
    spdlog::warn("omega divergence defect {:.3e} exceeds {:.1e}; re-projecting", d, tol);
    return project_solenoidal(omega);
}

// ---- nonlinear engine ----

NonlinearEngine::NonlinearEngine(const GridSpec& g, bool dealias_on)
    : grid_(g), dealias_(dealias_on), z1_(g.size()), z2_(g.size()), p_(g.size()), q_(g.size()),
      s_(g.size()) {
    const int n = g.n();
    xi1d_.resize(n);
    keep1d_.resize(n);
    for (int i = 0; i < n; ++i) {
        xi1d_[i] = g.xi(i);
        int w = g.wavenumber(i);
        // Nyquist plane always dropped so that packed transforms stay exactly Hermitian
        bool keep = (w != -n / 2) && (!dealias_on || 3 * std::abs(w) <= n);
        keep1d_[i] = keep ? 1 : 0;
    }
}

void NonlinearEngine::momentum(const cplx* a, const cplx* const om[3], cplx* m[3]) const {
    const int n = grid_.n();
    std::size_t idx = 0;
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i, ++idx) {
                double x1 = xi1d_[i], x2 = xi1d_[j], x3 = xi1d_[k];
                double k2 = x1 * x1 + x2 * x2 + x3 * x3;
                if (!(keep1d_[i] && keep1d_[j] && keep1d_[k]) || k2 == 0.0) {
                    m[0][idx] = m[1][idx] = m[2][idx] = 0.0;
                    continue;
                }
                double inv = 1.0 / k2;
                cplx aa = a[idx], w1 = om[0][idx], w2 = om[1][idx], w3 = om[2][idx];
                m[0][idx] = I * inv * (-x1 * aa + (x2 * w3 - x3 * w2));
                m[1][idx] = I * inv * (-x2 * aa + (x3 * w1 - x1 * w3));
                m[2][idx] = I * inv * (-x3 * aa + (x1 * w2 - x2 * w1));
            }
}

template <class Sink>
void NonlinearEngine::products(const cplx* a, const cplx* const om[3], Sink&& sink) {
    const int n = grid_.n();
    const std::size_t N = grid_.size();
    {
        cplx* m[3] = {p_.data(), q_.data(), z2_.data()};
        momentum(a, om, m);
        for (std::size_t i = 0; i < N; ++i) z1_[i] = p_[i] + I * q_[i];
    }
    fft_raw(grid_, z1_.data(), +1);
    fft_raw(grid_, z2_.data(), +1);
    active_kernels().quad_products(z1_.data(), z2_.data(), p_.data(), q_.data(), s_.data(), N);
    fft_raw(grid_, p_.data(), -1);
    fft_raw(grid_, q_.data(), -1);
    fft_raw(grid_, s_.data(), -1);

    const double sc = 1.0 / double(N);
    auto neg = [n](int i) { return i == 0 ? 0 : n - i; };
    std::size_t idx = 0;
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i, ++idx) {
                double x1 = xi1d_[i], x2 = xi1d_[j], x3 = xi1d_[k];
                if (!(keep1d_[i] && keep1d_[j] && keep1d_[k])) {
                    sink(idx, x1, x2, x3, cplx(0.0), cplx(0.0), cplx(0.0));
                    continue;
                }
                std::size_t m = grid_.index(neg(i), neg(j), neg(k));
                auto unpack = [&](const CVec& Z, cplx& F, cplx& G) {
                    cplx z = Z[idx], zc = std::conj(Z[m]);
                    F = 0.5 * sc * (z + zc);
                    G = cplx(0.0, -0.5 * sc) * (z - zc);
                };
                cplx P11, P22, P33, P12, P13, P23;
                unpack(p_, P11, P22);
                unpack(q_, P33, P12);
                unpack(s_, P13, P23);
                cplx N1 = I * (x1 * P11 + x2 * P12 + x3 * P13);
                cplx N2 = I * (x1 * P12 + x2 * P22 + x3 * P23);
                cplx N3 = I * (x1 * P13 + x2 * P23 + x3 * P33);
                sink(idx, x1, x2, x3, N1, N2, N3);
            }
}

void NonlinearEngine::compute_N(const cplx* a, const cplx* const om[3], cplx* N[3]) {
    products(a, om, [&](std::size_t idx, double, double, double, cplx N1, cplx N2, cplx N3) {
        N[0][idx] = N1;
        N[1][idx] = N2;
        N[2][idx] = N3;
    });
}

void NonlinearEngine::compute_Q(const cplx* a, const cplx* const om[3], cplx* divN, cplx* curlN[3]) {
    products(a, om, [&](std::size_t idx, double x1, double x2, double x3, cplx N1, cplx N2, cplx N3) {
        divN[idx] = I * (x1 * N1 + x2 * N2 + x3 * N3);
        curlN[0][idx] = I * (x2 * N3 - x3 * N2);
        curlN[1][idx] = I * (x3 * N1 - x1 * N3);
        curlN[2][idx] = I * (x1 * N2 - x2 * N1);
    });
}

// ---- field-level wrappers ----

namespace {

void check_state_inputs(const ScalarField& a, const VectorField3& omega, const char* who) {
    need_spectral(a, who);
    need_spectral(omega, who);
    if (a.grid != omega.grid()) throw UsageError(std::string(who) + ": grid mismatch");
    check_zero_mass(a, who);
    for (int d = 0; d < 3; ++d) check_zero_mass(omega[d], who);
}

}  // namespace

VectorField3 nonlinearity_N(const ScalarField& a, const VectorField3& omega_in, bool dealias_on) {
    check_state_inputs(a, omega_in, "nonlinearity_N");
    VectorField3 omega = ensure_solenoidal(omega_in);
    NonlinearEngine eng(a.grid, dealias_on);
    VectorField3 out = VectorField3::zeros(a.grid, Rep::Spectral);
    const cplx* om[3] = {omega[0].v.data(), omega[1].v.data(), omega[2].v.data()};
    cplx* N[3] = {out[0].v.data(), out[1].v.data(), out[2].v.data()};
    eng.compute_N(a.v.data(), om, N);
    return out;
}

QTerm q_term(const CurlDivState& s, bool dealias_on) {
    check_state_inputs(s.a, s.omega, "q_term");
    VectorField3 omega = ensure_solenoidal(s.omega);
    NonlinearEngine eng(s.a.grid, dealias_on);
    QTerm out{ScalarField(s.a.grid, Rep::Spectral), VectorField3::zeros(s.a.grid, Rep::Spectral)};
    const cplx* om[3] = {omega[0].v.data(), omega[1].v.data(), omega[2].v.data()};
    cplx* cn[3] = {out.curl_N[0].v.data(), out.curl_N[1].v.data(), out.curl_N[2].v.data()};
    eng.compute_Q(s.a.v.data(), om, out.div_N.v.data(), cn);
    return out;
}

}  // namespace mcns
