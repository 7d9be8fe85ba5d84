#include "mcns/propagators.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "mcns/errors.hpp"
#include "mcns/simd_kernels.hpp"

namespace mcns {

PhysicalParams::PhysicalParams(double epsilon_, double eta_, double c_)
    : epsilon(epsilon_), eta(eta_), c(c_), nu(0.5 * (epsilon_ + eta_)) {
    if (!(epsilon > 0.0) || !(eta > 0.0) || !(c > 0.0))
        throw DomainError("PhysicalParams: epsilon, eta and c must be strictly positive");
}

static double norm2(const Vec3& v) { return v[0] * v[0] + v[1] * v[1] + v[2] * v[2]; }

double heat_multiplier(const Vec3& xi, double nu, double t) {
    if (t < 0.0) throw DomainError("heat_multiplier: t must be >= 0");
    return std::exp(-nu * t * norm2(xi));
}

WaveMultipliers wave_multipliers_radial(double k, double c, double t) {
    if (t < 0.0) throw DomainError("wave_multipliers: t must be >= 0");
    if (k == 0.0) return {t, 1.0, 0.0};
    double ph = c * t * k;
    double s = std::sin(ph);
    return {s / (c * k), std::cos(ph), -c * k * s};
}

WaveMultipliers wave_multipliers(const Vec3& xi, double c, double t) {
    return wave_multipliers_radial(std::sqrt(norm2(xi)), c, t);
}

ScalarField apply_heat(const ScalarField& f, double viscosity, double t) {
    if (f.rep != Rep::Spectral) throw UsageError("apply_heat: input must be spectral");
    if (t < 0.0) throw DomainError("apply_heat: t must be >= 0");
    ScalarField out = f;
    RVec m(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) m[i] = std::exp(-viscosity * t * norm2(f.grid.xi_at(i)));
    active_kernels().scale_real(out.v.data(), m.data(), out.size());
    return out;
}

VectorField3 apply_heat(const VectorField3& omega, const PhysicalParams& params, double t) {
    omega.check_consistent();
    return VectorField3(apply_heat(omega[0], params.epsilon, t), apply_heat(omega[1], params.epsilon, t),
                        apply_heat(omega[2], params.epsilon, t));
}

std::pair<ScalarField, ScalarField> apply_heat_wave(const ScalarField& rho, const ScalarField& a,
                                                    const PhysicalParams& params, double t) {
    if (rho.rep != Rep::Spectral || a.rep != Rep::Spectral)
        throw UsageError("apply_heat_wave: inputs must be spectral");
    if (rho.grid != a.grid) throw UsageError("apply_heat_wave: grid mismatch");
    if (t < 0.0) throw DomainError("apply_heat_wave: t must be >= 0");
    ScalarField r = rho, q = a;
    LinearFlow flow(rho.grid, params, t);
    flow.apply_rho_a(r.v.data(), q.v.data());
    return {r, q};
}

std::pair<ScalarField, ScalarField> apply_wave_matrix(const ScalarField& rho, const ScalarField& a,
                                                      double c, double t) {
    if (rho.rep != Rep::Spectral || a.rep != Rep::Spectral)
        throw UsageError("apply_wave_matrix: inputs must be spectral");
    ScalarField r = rho, q = a;
    const std::size_t N = rho.size();
    RVec A(N), B(N), C(N);
    for (std::size_t i = 0; i < N; ++i) {
        WaveMultipliers wm = wave_multipliers(rho.grid.xi_at(i), c, t);
        A[i] = wm.w_t;
        B[i] = wm.w;
        C[i] = wm.w_tt;
    }
    active_kernels().heat_wave_block(r.v.data(), q.v.data(), A.data(), B.data(), C.data(), N);
    return {r, q};
}

LinearFlow::LinearFlow(const GridSpec& g, const PhysicalParams& p, double t) : grid_(g), t_(t) {
    if (t < 0.0) throw DomainError("LinearFlow: t must be >= 0");
    const std::size_t N = g.size();
    A_.resize(N);
    B_.resize(N);
    C_.resize(N);
    heat_eps_.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        Vec3 xi = g.xi_at(i);
        double k2 = norm2(xi);
        double hn = std::exp(-p.nu * t * k2);
        WaveMultipliers wm = wave_multipliers_radial(std::sqrt(k2), p.c, t);
        A_[i] = hn * wm.w_t;
        B_[i] = hn * wm.w;
        C_[i] = hn * wm.w_tt;
        heat_eps_[i] = std::exp(-p.epsilon * t * k2);
    }
}

void LinearFlow::apply_rho_a(cplx* rho, cplx* a) const {
    active_kernels().heat_wave_block(rho, a, A_.data(), B_.data(), C_.data(), grid_.size());
}

void LinearFlow::apply_omega(cplx* om) const {
    active_kernels().scale_real(om, heat_eps_.data(), grid_.size());
}

void LinearFlow::apply(cplx* rho, cplx* a, cplx* om0, cplx* om1, cplx* om2) const {
    apply_rho_a(rho, a);
    apply_omega(om0);
    apply_omega(om1);
    apply_omega(om2);
}

// ---- Kirchhoff ----

SmoothSampler gaussian_sampler(double s) {
    if (!(s > 0.0)) throw DomainError("gaussian_sampler: s must be positive");
    const double pref = std::pow(4.0 * M_PI * s, -1.5);
    SmoothSampler out;
    out.value = [=](const Vec3& x) { return pref * std::exp(-norm2(x) / (4.0 * s)); };
    out.grad = [=](const Vec3& x) {
        double g = pref * std::exp(-norm2(x) / (4.0 * s));
        return Vec3{-x[0] / (2.0 * s) * g, -x[1] / (2.0 * s) * g, -x[2] / (2.0 * s) * g};
    };
    out.hess = [=](const Vec3& x) {
        double g = pref * std::exp(-norm2(x) / (4.0 * s));
        std::array<Vec3, 3> H{};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                H[i][j] = g * (x[i] * x[j] / (4.0 * s * s) - (i == j ? 1.0 / (2.0 * s) : 0.0));
        return H;
    };
    return out;
}

namespace {

struct TrigEval {
    double v;
    Vec3 g;
    std::array<Vec3, 3> H;
};

TrigEval trig_eval(const ScalarField& f, const Vec3& x) {
    const GridSpec& G = f.grid;
    const int n = G.n();
    std::array<std::vector<cplx>, 3> ph;
    for (int d = 0; d < 3; ++d) {
        ph[d].resize(n);
        for (int i = 0; i < n; ++i) ph[d][i] = std::polar(1.0, G.xi(i) * x[d]);
    }
    TrigEval r{};
    cplx v = 0.0;
    cplx g[3] = {0.0, 0.0, 0.0};
    cplx H[3][3] = {};
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) {
            cplx e23 = ph[1][j] * ph[2][k];
            for (int i = 0; i < n; ++i) {
                cplx term = f.v[G.index(i, j, k)] * ph[0][i] * e23;
                double xi[3] = {G.xi(i), G.xi(j), G.xi(k)};
                v += term;
                for (int a = 0; a < 3; ++a) {
                    g[a] += cplx(0.0, xi[a]) * term;
                    for (int b = 0; b < 3; ++b) H[a][b] -= xi[a] * xi[b] * term;
                }
            }
        }
    r.v = v.real();
    for (int a = 0; a < 3; ++a) {
        r.g[a] = g[a].real();
        for (int b = 0; b < 3; ++b) r.H[a][b] = H[a][b].real();
    }
    return r;
}

}  // namespace

SmoothSampler trig_sampler(const ScalarField& spectral) {
    if (spectral.rep != Rep::Spectral) throw UsageError("trig_sampler: field must be spectral");
    auto f = std::make_shared<ScalarField>(spectral);
    SmoothSampler out;
    out.value = [f](const Vec3& x) { return trig_eval(*f, x).v; };
    out.grad = [f](const Vec3& x) { return trig_eval(*f, x).g; };
    out.hess = [f](const Vec3& x) { return trig_eval(*f, x).H; };
    return out;
}

namespace {

struct SphereRule {
    std::vector<Vec3> z;
    std::vector<double> w;  // sums to 1
};

const SphereRule& sphere_rule(int order) {
    static std::mutex mu;
    static std::map<int, SphereRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;

    std::vector<double> pos = boost::math::legendre_p_zeros<double>(order);
    std::vector<double> nodes;
    for (double p : pos) {
        nodes.push_back(p);
        if (p != 0.0) nodes.push_back(-p);
    }
    const int nphi = 2 * order;
    SphereRule rule;
    for (double mu_ : nodes) {
        double dp = boost::math::legendre_p_prime(order, mu_);
        double wmu = 2.0 / ((1.0 - mu_ * mu_) * dp * dp);
        double st = std::sqrt(std::max(0.0, 1.0 - mu_ * mu_));
        for (int j = 0; j < nphi; ++j) {
            double phi = 2.0 * M_PI * (j + 0.5) / nphi;
            rule.z.push_back({st * std::cos(phi), st * std::sin(phi), mu_});
            rule.w.push_back(0.5 * wmu / nphi);
        }
    }
    return cache.emplace(order, std::move(rule)).first->second;
}

}  // namespace

KirchhoffValues kirchhoff_eval(const SmoothSampler& h, const Vec3& x, double c, double t,
                               int quad_order) {
    if (!(t > 0.0)) throw DomainError("kirchhoff_eval: t must be > 0");
    if (quad_order < kKirchhoffMinOrder)
        throw UsageError("kirchhoff_eval: quad_order below minimum " + std::to_string(kKirchhoffMinOrder));
    const SphereRule& rule = sphere_rule(quad_order);
    const double R = c * t;
    double M = 0.0, M1 = 0.0, M2 = 0.0;
    for (std::size_t q = 0; q < rule.z.size(); ++q) {
        const Vec3& z = rule.z[q];
        Vec3 y{x[0] + R * z[0], x[1] + R * z[1], x[2] + R * z[2]};
        M += rule.w[q] * h.value(y);
        Vec3 g = h.grad(y);
        M1 += rule.w[q] * (g[0] * z[0] + g[1] * z[1] + g[2] * z[2]);
        auto H = h.hess(y);
        double zHz = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) zHz += z[i] * H[i][j] * z[j];
        M2 += rule.w[q] * zHz;
    }
    return {t * M, M + R * M1, 2.0 * c * M1 + c * R * M2};
}

}  // namespace mcns
