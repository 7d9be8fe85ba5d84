#pragma once

#include "mcns/fourier.hpp"
#include "mcns/propagators.hpp"

namespace mcns {

// (rho, a = div m, omega = curl m) with physical parameters
struct CurlDivState {
    ScalarField rho;
    ScalarField a;
    VectorField3 omega;
    PhysicalParams params;

    const GridSpec& grid() const { return rho.grid; }
    static CurlDivState zeros(const GridSpec& g, const PhysicalParams& p);
    CurlDivState& operator+=(const CurlDivState& o);
    CurlDivState& operator-=(const CurlDivState& o);
    CurlDivState& operator*=(double s);
};

CurlDivState operator+(CurlDivState a, const CurlDivState& b);
CurlDivState operator-(CurlDivState a, const CurlDivState& b);

// all spectral in, spectral out
ScalarField divergence(const VectorField3& m);
VectorField3 curl(const VectorField3& m);
VectorField3 gradient(const ScalarField& f);
ScalarField laplacian(const ScalarField& f);

// Pi a = grad Delta^{-1} a: -i xi a_hat / |xi|^2, zero mode 0
VectorField3 pi_op(const ScalarField& a);
// B omega = -curl Delta^{-1} omega: i xi x omega_hat / |xi|^2, zero mode 0
VectorField3 biot_savart(const VectorField3& omega);
VectorField3 momentum(const ScalarField& a, const VectorField3& omega);

// N = sum_j d_j (m_j m), products formed in physical space
VectorField3 nonlinearity_N(const ScalarField& a, const VectorField3& omega, bool dealias_on = true);

struct QTerm {
    ScalarField div_N;
    VectorField3 curl_N;
};
// Q(u,u) = (0, div N, curl N)
QTerm q_term(const CurlDivState& state, bool dealias_on = true);

// throws ZeroMassError if |f_hat(0)| > 1e-10 * ||f||
void check_zero_mass(const ScalarField& f, const char* who);
// max |xi . omega_hat| / max |xi||omega_hat|
double solenoidal_defect(const VectorField3& omega);
VectorField3 project_solenoidal(const VectorField3& omega);
// re-projects (with a logged warning) when the defect exceeds tol
VectorField3 ensure_solenoidal(const VectorField3& omega, double tol = 1e-10);

// Hot-path evaluation of the quadratic term on raw coefficient arrays.
// Two real fields share one complex FFT in each direction (5 FFTs per call).
class NonlinearEngine {
public:
    NonlinearEngine(const GridSpec& g, bool dealias_on = true);

    const GridSpec& grid() const { return grid_; }
    // m_hat from (a_hat, omega_hat), masked
    void momentum(const cplx* a, const cplx* const om[3], cplx* m[3]) const;
    // N_hat
    void compute_N(const cplx* a, const cplx* const om[3], cplx* N[3]);
    // div N and curl N
    void compute_Q(const cplx* a, const cplx* const om[3], cplx* divN, cplx* curlN[3]);

private:
    template <class Sink>
    void products(const cplx* a, const cplx* const om[3], Sink&& sink);

    GridSpec grid_;
    bool dealias_;
    std::vector<double> xi1d_;
    std::vector<unsigned char> keep1d_;  // dealias and Nyquist mask per axis index
    CVec z1_, z2_, p_, q_, s_;
};

}  // namespace mcns
