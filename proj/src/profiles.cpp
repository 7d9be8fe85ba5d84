#include "mcns/profiles.hpp"

#include <cmath>

#include "mcns/errors.hpp"

namespace mcns {

namespace {

const double kPref = std::pow(4.0 * M_PI, -1.5);

// p(u) exp(-u^2 / (4s)), p given by coefficients in u
struct PolyGauss {
    std::vector<double> c;
    double s;

    double operator()(double u) const {
        double p = 0.0;
        for (std::size_t k = c.size(); k-- > 0;) p = p * u + c[k];
        return p * std::exp(-u * u / (4.0 * s));
    }
    // (p' - u p / (2s)) e
    PolyGauss deriv() const {
        std::vector<double> d(c.size() + 1, 0.0);
        for (std::size_t k = 0; k < d.size(); ++k) {
            if (k + 1 < c.size()) d[k] += (k + 1) * c[k + 1];
            if (k >= 1 && k - 1 < c.size()) d[k] -= c[k - 1] / (2.0 * s);
        }
        return {d, s};
    }
};

double small_r(double s) { return 1e-4 * std::sqrt(s); }

// [G(R+r) - G(R-r)] / r^power, power 1 or 3 (power 3 needs G'(R) = 0).
// dG is G'. Below the cutoff the odd Taylor series 2 sum G^(m)(R) r^m / m! is used.
double odd_diff(const std::function<double(double)>& G, const PolyGauss& dG, double R, double r, int power,
                double s) {
    if (r >= small_r(s)) return (G(R + r) - G(R - r)) / std::pow(r, power);
    // derivatives G^(1), G^(3), ..., G^(7)
    std::vector<double> odd;
    PolyGauss d = dG;
    for (int m = 1; m <= 7; ++m) {
        if (m % 2 == 1) odd.push_back(d(R));
        d = d.deriv();
    }
    double fact[8] = {1, 1, 2, 6, 24, 120, 720, 5040};
    double sum = 0.0;
    int terms = 0;
    for (int m = power; m <= 7 && terms < 3; m += 2, ++terms)
        sum += 2.0 * odd[(m - 1) / 2] * std::pow(r, m - power) / fact[m];
    return sum;
}

double rad(const Vec3& x) { return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]); }

struct Setup {
    double s, R, r;
};
Setup setup(const Vec3& x, const ProfileParams& p, double visc) {
    return {1.0 + visc * p.t, p.c * p.t, rad(x)};
}

}  // namespace

ProfileParams::ProfileParams(double nu_, double c_, double epsilon_, double t_)
    : nu(nu_), c(c_), epsilon(epsilon_), t(t_) {
    if (!(nu > 0.0) || !(c > 0.0) || !(epsilon > 0.0))
        throw DomainError("ProfileParams: nu, c and epsilon must be strictly positive");
    if (t < 0.0) throw DomainError("ProfileParams: t must be >= 0");
}

ProfileParams ProfileParams::from(const PhysicalParams& p, double t) {
    return ProfileParams(p.nu, p.c, p.epsilon, t);
}

double erf_paper(double zeta) { return std::sqrt(M_PI) * std::erf(zeta); }

double profile_rho1(const Vec3& x, const ProfileParams& p) {
    auto [s, R, r] = setup(x, p, p.nu);
    PolyGauss g{{0.0, 1.0}, s};  // u e(u)
    double D = odd_diff(g, g.deriv(), R, r, 1, s);
    return std::pow(4.0 * M_PI * s, -1.5) * D / 2.0;
}

double profile_a2(const Vec3& x, const ProfileParams& p) { return profile_rho1(x, p); }

double profile_a1(const Vec3& x, const ProfileParams& p) {
    auto [s, R, r] = setup(x, p, p.nu);
    PolyGauss h{{-1.0, 0.0, 1.0 / (2.0 * s)}, s};  // (u^2/2s - 1) e(u)
    double D = odd_diff(h, h.deriv(), R, r, 1, s);
    return p.c * std::pow(4.0 * M_PI * s, -1.5) * D / 2.0;
}

double profile_rho2(const Vec3& x, const ProfileParams& p) {
    auto [s, R, r] = setup(x, p, p.nu);
    PolyGauss e{{1.0}, s};
    double D = odd_diff(e, e.deriv(), R, r, 1, s);
    return kPref / std::sqrt(s) * D / p.c;
}

Vec3 profile_pi_a1(const Vec3& x, const ProfileParams& p) {
    auto [s, R, r] = setup(x, p, p.nu);
    // q(u) = e(u) [ (u^2 - R u)/(2s) + 1 ], q'(R) = 0
    PolyGauss q{{1.0, -R / (2.0 * s), 1.0 / (2.0 * s)}, s};
    double D = odd_diff(q, q.deriv(), R, r, 3, s);
    double f = -p.c * kPref / std::sqrt(s) * D;
    return {f * x[0], f * x[1], f * x[2]};
}

Vec3 profile_pi_a2(const Vec3& x, const ProfileParams& p) {
    auto [s, R, r] = setup(x, p, p.nu);
    const double rs = std::sqrt(s);
    // psi(u) = Erf(u / 2 sqrt s) - (u - R) e(u) / sqrt s,  psi' = (u - R) u e / (2 s^{3/2})
    auto psi = [=](double u) { return erf_paper(u / (2.0 * rs)) - (u - R) * std::exp(-u * u / (4.0 * s)) / rs; };
    double k = 1.0 / (2.0 * s * rs);
    PolyGauss dpsi{{0.0, -R * k, k}, s};
    double D = odd_diff(psi, dpsi, R, r, 3, s);
    double f = kPref * D;
    return {f * x[0], f * x[1], f * x[2]};
}

static int axis_of(int i, const char* who) {
    if (i < 1 || i > 3) throw UsageError(std::string(who) + ": axis must be 1, 2 or 3");
    return i - 1;
}

Vec3 profile_g(int i, const Vec3& x, const ProfileParams& p) {
    int a = axis_of(i, "profile_g");
    double s = 1.0 + p.epsilon * p.t;
    double G = kPref * std::pow(s, -1.5) * std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (4.0 * s));
    // curl(G e_a)_j = eps_{j l a} d_l G, d_l G = -x_l G / 2s
    Vec3 out{0.0, 0.0, 0.0};
    int j1 = (a + 1) % 3, j2 = (a + 2) % 3;
    out[j1] = -x[j2] / (2.0 * s) * G;
    out[j2] = x[j1] / (2.0 * s) * G;
    return out;
}

Vec3 profile_b_g(int i, const Vec3& x, const ProfileParams& p) {
    int a = axis_of(i, "profile_b_g");
    const double s = 1.0 + p.epsilon * p.t;
    const double rs = std::sqrt(s), s32 = s * rs;
    const double r = rad(x);
    const double e = std::exp(-r * r / (4.0 * s));
    // Psi(r) = -2 r e / sqrt s + 2 Erf(r / 2 sqrt s), Psi' = r^2 e / s^{3/2}
    // Phi = Psi / r^3, Phi'/r = e/(s^{3/2} r^2) - 3 Psi / r^5
    double Phi, dPhi_r;
    if (r < small_r(s)) {
        double z = r * r / s;
        Phi = (1.0 / 3.0 - z / 20.0 + z * z / 224.0) / s32;
        dPhi_r = (-1.0 / 10.0 + z / 56.0) / (s32 * s);
    } else {
        double Psi = -2.0 * r * e / rs + 2.0 * erf_paper(r / (2.0 * rs));
        Phi = Psi / (r * r * r);
        dPhi_r = e / (s32 * r * r) - 3.0 * Psi / std::pow(r, 5);
    }
    const double G = e / s32;
    Vec3 out;
    for (int j = 0; j < 3; ++j)
        out[j] = kPref * ((j == a ? G - Phi : 0.0) - x[a] * x[j] * dPhi_r);
    return out;
}

double radial_wave_solution(const std::function<double(double)>& u0, double r, double c, double t) {
    if (!(r > 0.0)) throw DomainError("radial_wave_solution: r must be > 0");
    double R = c * t;
    return ((r - R) * u0(std::abs(r - R)) + (r + R) * u0(r + R)) / (2.0 * r);
}

const std::vector<std::string>& profile_names() {
    static const std::vector<std::string> names = {"rho1", "a1",  "rho2", "a2",  "pi_a1", "pi_a2",
                                                   "g1",   "g2",  "g3",   "bg1", "bg2",   "bg3"};
    return names;
}

std::vector<std::pair<std::string, double>> evaluate_profile(const std::string& name, const Vec3& x,
                                                             const ProfileParams& p) {
    auto vec = [&](const Vec3& v) {
        return std::vector<std::pair<std::string, double>>{
            {name + "_1", v[0]}, {name + "_2", v[1]}, {name + "_3", v[2]}};
    };
    if (name == "rho1") return {{name, profile_rho1(x, p)}};
    if (name == "a1") return {{name, profile_a1(x, p)}};
    if (name == "rho2") return {{name, profile_rho2(x, p)}};
    if (name == "a2") return {{name, profile_a2(x, p)}};
    if (name == "pi_a1") return vec(profile_pi_a1(x, p));
    if (name == "pi_a2") return vec(profile_pi_a2(x, p));
    if (name.size() == 2 && name[0] == 'g' && name[1] >= '1' && name[1] <= '3')
        return vec(profile_g(name[1] - '0', x, p));
    if (name.size() == 3 && name.rfind("bg", 0) == 0 && name[2] >= '1' && name[2] <= '3')
        return vec(profile_b_g(name[2] - '0', x, p));
    throw UsageError("unknown profile quantity '" + name + "'");
}

ScalarField sample_scalar_profile(const GridSpec& g, double (*f)(const Vec3&, const ProfileParams&),
                                  const ProfileParams& p) {
    return ScalarField::sample(g, [&](const Vec3& x) { return f(x, p); });
}

VectorField3 sample_vector_profile(const GridSpec& g, const std::function<Vec3(const Vec3&)>& f) {
    return VectorField3::sample(g, f);
}

}  // namespace mcns
