#pragma once

#include <array>
#include <functional>
#include <utility>

#include "mcns/fourier.hpp"

namespace mcns {

struct PhysicalParams {
    double epsilon = 1.0;
    double eta = 1.0;
    double c = 1.0;
    double nu = 1.0;  // (epsilon + eta) / 2

    PhysicalParams() = default;
    PhysicalParams(double epsilon_, double eta_, double c_);
};

// e^{-nu t |xi|^2}
double heat_multiplier(const Vec3& xi, double nu, double t);

struct WaveMultipliers {
    double w;
    double w_t;
    double w_tt;
};

// w = sin(ct|xi|)/(c|xi|) (= t at xi = 0), w_t = cos(ct|xi|), w_tt = -c|xi| sin(ct|xi|)
WaveMultipliers wave_multipliers(const Vec3& xi, double c, double t);
WaveMultipliers wave_multipliers_radial(double k, double c, double t);

ScalarField apply_heat(const ScalarField& f, double viscosity, double t);
// componentwise K_eps(t)
VectorField3 apply_heat(const VectorField3& omega, const PhysicalParams& params, double t);

// (rho_L, a_L) = G_W(t) e^{-nu t |xi|^2} (rho_0, a_0), G_W = [[w_t, -w], [-w_tt, w_t]]
std::pair<ScalarField, ScalarField> apply_heat_wave(const ScalarField& rho, const ScalarField& a,
                                                    const PhysicalParams& params, double t);

// Separate wave-only factor, used by tests of commutation with the heat multiplier.
std::pair<ScalarField, ScalarField> apply_wave_matrix(const ScalarField& rho, const ScalarField& a,
                                                      double c, double t);

// Per-mode coefficients of e^{L t}; built once per step size and reused.
class LinearFlow {
public:
    LinearFlow() = default;
    LinearFlow(const GridSpec& g, const PhysicalParams& p, double t);

    double t() const { return t_; }
    const GridSpec& grid() const { return grid_; }
    // in-place on spectral coefficient arrays
    void apply(cplx* rho, cplx* a, cplx* om0, cplx* om1, cplx* om2) const;
    void apply_rho_a(cplx* rho, cplx* a) const;
    void apply_omega(cplx* om) const;

private:
    GridSpec grid_;
    double t_ = 0.0;
    RVec A_, B_, C_, heat_eps_;
};

// Smooth function with first and second derivatives, for the Kirchhoff oracle.
struct SmoothSampler {
    std::function<double(const Vec3&)> value;
    std::function<Vec3(const Vec3&)> grad;
    std::function<std::array<Vec3, 3>(const Vec3&)> hess;
};

// (4 pi s)^{-3/2} exp(-|x|^2 / (4 s)); K_nu(t) * phi0 is this with s = 1 + nu t
SmoothSampler gaussian_sampler(double s);
// exact trigonometric interpolation of a spectral grid field (O(n^3) per point)
SmoothSampler trig_sampler(const ScalarField& spectral);

struct KirchhoffValues {
    double w;     // w(t) * h
    double w_t;   // d/dt w(t) * h
    double w_tt;  // d^2/dt^2 w(t) * h
};

constexpr int kKirchhoffMinOrder = 4;

// Spherical-mean evaluation in d = 3 with product Gauss-Legendre (cos theta) x
// trapezoid (phi) rule, quad_order x 2 quad_order nodes.
KirchhoffValues kirchhoff_eval(const SmoothSampler& h, const Vec3& x, double c, double t,
                               int quad_order = 32);

}  // namespace mcns
