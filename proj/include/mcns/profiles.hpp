#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "mcns/fourier.hpp"
#include "mcns/propagators.hpp"

namespace mcns {

struct ProfileParams {
    double nu = 1.0;
    double c = 1.0;
    double epsilon = 1.0;
    double t = 0.0;

    ProfileParams() = default;
    ProfileParams(double nu_, double c_, double epsilon_, double t_);
    static ProfileParams from(const PhysicalParams& p, double t);
};

// 2 * int_0^zeta e^{-z^2} dz  (= sqrt(pi) * erf)
double erf_paper(double zeta);

// radial closed forms; the origin uses a Taylor limit in |x|
double profile_rho1(const Vec3& x, const ProfileParams& p);
double profile_a1(const Vec3& x, const ProfileParams& p);
double profile_rho2(const Vec3& x, const ProfileParams& p);
double profile_a2(const Vec3& x, const ProfileParams& p);
Vec3 profile_pi_a1(const Vec3& x, const ProfileParams& p);
Vec3 profile_pi_a2(const Vec3& x, const ProfileParams& p);

// i in {1,2,3}: g_i = (4 pi)^{-3/2} (1 + eps t)^{-3/2} curl(e^{-|x|^2/(4(1+eps t))} e_i)
Vec3 profile_g(int i, const Vec3& x, const ProfileParams& p);
Vec3 profile_b_g(int i, const Vec3& x, const ProfileParams& p);

// ((r - ct) u0(|r - ct|) + (r + ct) u0(r + ct)) / (2r), radial wave solution with data (u0, 0)
double radial_wave_solution(const std::function<double(double)>& u0, double r, double c, double t);

// named quantity -> (column label, value) pairs; vectors expand to _1,_2,_3
// names: rho1 a1 rho2 a2 pi_a1 pi_a2 g1 g2 g3 bg1 bg2 bg3
std::vector<std::pair<std::string, double>> evaluate_profile(const std::string& name, const Vec3& x,
                                                             const ProfileParams& p);
const std::vector<std::string>& profile_names();

ScalarField sample_scalar_profile(const GridSpec& g, double (*f)(const Vec3&, const ProfileParams&),
                                  const ProfileParams& p);
VectorField3 sample_vector_profile(const GridSpec& g, const std::function<Vec3(const Vec3&)>& f);

}  // namespace mcns
