#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mcns/fourier.hpp"
#include "mcns/propagators.hpp"

namespace mcns {

struct MultiIndex {
    int a1 = 0, a2 = 0, a3 = 0;

    int order() const { return a1 + a2 + a3; }
    int operator[](int d) const { return d == 0 ? a1 : (d == 1 ? a2 : a3); }
    std::string key() const;  // "(a1,a2,a3)"
    static MultiIndex parse(const std::string& s);

    auto operator<=>(const MultiIndex&) const = default;
};

// all indices with order <= max_order, graded then lexicographic
std::vector<MultiIndex> multi_indices_upto(int max_order);

double phi0(const Vec3& x);
// d^alpha of (4 pi s)^{-3/2} exp(-|x|^2/(4 s)); s = 1 gives phi0
double gaussian_derivative(const MultiIndex& alpha, const Vec3& x, double s = 1.0);
// (2^|alpha|/alpha!) e^{|x|^2/4} d^alpha e^{-|x|^2/4}
double hermite_poly(const MultiIndex& alpha, const Vec3& x);

constexpr int kMaxHermiteOrder = 3;

// h^3 sum H_alpha f, f physical (spectral input is transformed)
double moment_coeff(const ScalarField& f, const MultiIndex& alpha);

// Fourier coefficients of d^alpha K_nu(t) * phi0 on the grid
ScalarField heat_profile(const GridSpec& g, const MultiIndex& alpha, double nu, double t);

struct ScalarApprox {
    ScalarField approx;     // spectral
    ScalarField remainder;  // spectral
    std::map<MultiIndex, double> coeffs;
};
ScalarApprox scalar_hermite_approx(const ScalarField& u0, double n, double nu, double t);

struct HypParaApprox {
    ScalarField rho_H, a_H, rho_LR, a_LR;  // spectral
    std::map<MultiIndex, double> rho_coeffs, a_coeffs;
};
HypParaApprox hyp_para_hermite_approx(const ScalarField& rho0, const ScalarField& a0, double n,
                                      const PhysicalParams& params, double t);

// ---- divergence-free table ----

struct Table1Row {
    MultiIndex alpha;  // row label
    int j;             // branch
    MultiIndex deriv;  // f = curl(d^deriv phi0 e_axis)
    int axis;
};
const std::vector<Table1Row>& table1_rows();

struct Table1Profile {
    bool zero = true;
    std::function<Vec3(const Vec3&)> p;
    std::function<Vec3(const Vec3&)> f;
};
// zero pair for anything not in the table
Table1Profile table1_profiles(const MultiIndex& alpha_tilde, int j);

// heat-evolved f for a row, K_eps(t) * f, spectral
VectorField3 table1_field(const GridSpec& g, const Table1Row& row, double eps, double t);
// <p, omega> by quadrature with the face-decay check on |p . omega|
double divfree_coeff(const VectorField3& omega, const Table1Row& row);

struct DivfreeApprox {
    VectorField3 omega_H, omega_LR;  // spectral
    std::map<std::pair<MultiIndex, int>, double> coeffs;
};
DivfreeApprox divfree_hermite_approx(const VectorField3& omega0, double n, const PhysicalParams& params,
                                     double t);

// ---- coefficient sets ----

class HermiteCoefficientSet {
public:
    std::map<MultiIndex, double> rho;
    std::map<MultiIndex, double> a;
    std::map<std::pair<MultiIndex, int>, double> divfree;

    static HermiteCoefficientSet compute(const ScalarField& rho0, const ScalarField& a0,
                                         const VectorField3& omega0, double n);
    std::string to_json() const;
    static HermiteCoefficientSet from_json(const std::string& text);
};

int floor_weight(double n);  // validates n in [0,2]

}  // namespace mcns
