#pragma once

#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mcns/fourier.hpp"
#include "mcns/hermite.hpp"
#include "mcns/solver.hpp"

namespace mcns {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class WeightKind { Homogeneous, Inhomogeneous };  // |x|^mu, (1+|x|)^mu

struct NormSpec {
    double p = 2.0;
    double mu = 0.0;
    WeightKind weight_kind = WeightKind::Homogeneous;
    MultiIndex derivative{};

    void validate() const;
    std::string label() const;
};

double weighted_norm(const ScalarField& f, const NormSpec& spec);
// max over components
double weighted_norm(const VectorField3& f, const NormSpec& spec);

// sup over p in {1, 9/8, 5/4, 11/8, 3/2} of ||rho||_{W^{1,p}(n)} + ||a||_{L^p(n)} + ||omega||_{L^p(n)},
// weights (1+|x|)^n, W^{1,p}(n) norm = ||w f|| + sum_i ||w d_i f||
double initial_energy(const CurlDivState& u0, double n);

namespace rates {
// p may be kInf
double r(int alpha_order, double p);
double ell(double n, double p, double mu);
double ell_tilde(double n, double p, double mu);
double ell_hat(int k, double p, int alpha_order);
double b(double n, double p);
double frak_b(double n, double p);
double bb(double n, double p);
}  // namespace rates

struct RateArgs {
    double n = 0.0;
    double p = 1.0;
    double mu = 0.0;
    int alpha = 0;
    int k = 1;
};
// name in {r, ell, ell_tilde, ell_hat, b, frak_b, bb}
double rate(const std::string& name, const RateArgs& args);

struct DecayFit {
    std::vector<std::pair<double, double>> series;
    double t_lo = 0.0, t_hi = 0.0;
    double slope = 0.0;
    double intercept = 0.0;
    double log_coeff = 0.0;
    double r_squared = 0.0;
    bool log_factor_flag = false;
    std::size_t samples = 0;
};

// log y = s log t (+ beta log log(1+t)) + c, least squares over t in [lo, hi]
DecayFit fit_decay(const std::vector<std::pair<double, double>>& series, double t_lo, double t_hi,
                   bool with_log = false);

// ---- theory report ----

struct ReportRow {
    std::string quantity;
    double p, mu;
    int alpha;
    double window_lo, window_hi;
    double slope, predicted, margin;
    std::string verdict;  // pass | fail | vacuous
};

struct TheoryReport {
    std::vector<ReportRow> rows;
    std::string csv() const;
    std::string text() const;
    bool all_pass() const;
};

constexpr double kReportTolerance = 0.15;

// predicted log-log slope for a report quantity, e.g. "omega", "a_H", "rho_NR", "omega_err"
double predicted_slope(const std::string& quantity, double n, double p, double mu, int alpha);

// Collects norm series from decomposition snapshots without keeping the fields.
class ReportAccumulator {
public:
    ReportAccumulator(double n, std::vector<NormSpec> specs, double t_lo, double t_hi);
    void add(const DecompositionSnapshot& d);
    TheoryReport finish() const;
    const std::map<std::string, std::vector<std::pair<double, double>>>& series() const { return series_; }

private:
    double n_;
    std::vector<NormSpec> specs_;
    double lo_, hi_;
    std::map<std::string, std::vector<std::pair<double, double>>> series_;  // key "quantity|spec index"
};

TheoryReport theory_report(const std::vector<DecompositionSnapshot>& decomp, double n,
                           const std::vector<NormSpec>& specs, double t_lo, double t_hi);

}  // namespace mcns
