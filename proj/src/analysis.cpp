#include "mcns/analysis.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "mcns/errors.hpp"

namespace mcns {

namespace {

const cplx I(0.0, 1.0);

std::string fmt_num(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

bool is_inf(double p) { return std::isinf(p) && p > 0; }

// physical samples of d^alpha f
ScalarField derived_physical(const ScalarField& f, const MultiIndex& d) {
    if (d.order() == 0) return f.rep == Rep::Physical ? f : inverse_transform(f);
    ScalarField s = f.rep == Rep::Spectral ? f : forward_transform(f);
    for (std::size_t i = 0; i < s.size(); ++i) {
        Vec3 xi = s.grid.xi_at(i);
        cplx m = 1.0;
        for (int a = 0; a < 3; ++a)
            for (int q = 0; q < d[a]; ++q) m *= I * xi[a];
        s.v[i] *= m;
    }
    return inverse_transform(s);
}

}  // namespace

void NormSpec::validate() const {
    if (!(p >= 1.0)) throw DomainError("NormSpec: p must be >= 1");
    if (!(mu >= 0.0)) throw DomainError("NormSpec: mu must be >= 0");
    if (derivative.order() > kMaxHermiteOrder) throw UnsupportedOrderError("NormSpec: derivative order > 3");
}

std::string NormSpec::label() const {
    return "p=" + fmt_num(p) + " mu=" + fmt_num(mu) +
           (weight_kind == WeightKind::Homogeneous ? " |x|" : " (1+|x|)") + " d=" + derivative.key();
}

double weighted_norm(const ScalarField& f, const NormSpec& spec) {
    spec.validate();
    ScalarField g = derived_physical(f, spec.derivative);
    const GridSpec& G = g.grid;
    const int n = G.n();
    const double h3 = std::pow(G.h(), 3);
    const bool inf = is_inf(spec.p);
    double acc = 0.0;
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                double v = std::abs(g.v[G.index(i, j, k)].real());
                if (spec.mu != 0.0) {
                    double x = G.coord(i), y = G.coord(j), z = G.coord(k);
                    double r = std::sqrt(x * x + y * y + z * z);
                    double base = spec.weight_kind == WeightKind::Homogeneous ? r : 1.0 + r;
                    v *= std::pow(base, spec.mu);
                }
                if (inf) acc = std::max(acc, v);
                else if (spec.p == 1.0) acc += v;
                else if (spec.p == 2.0) acc += v * v;
                else acc += std::pow(v, spec.p);
            }
    if (inf) return acc;
    acc *= h3;
    if (spec.p == 1.0) return acc;
    if (spec.p == 2.0) return std::sqrt(acc);
    return std::pow(acc, 1.0 / spec.p);
}

double weighted_norm(const VectorField3& f, const NormSpec& spec) {
    f.check_consistent();
    double m = 0.0;
    for (int d = 0; d < 3; ++d) m = std::max(m, weighted_norm(f[d], spec));
    return m;
}

double initial_energy(const CurlDivState& u0, double n) {
    if (!(n >= 0.0)) throw DomainError("initial_energy: n must be >= 0");
    const double ps[] = {1.0, 9.0 / 8.0, 5.0 / 4.0, 11.0 / 8.0, 1.5};
    double best = 0.0;
    for (double p : ps) {
        NormSpec s{p, n, WeightKind::Inhomogeneous, {}};
        double e = weighted_norm(u0.rho, s) + weighted_norm(u0.a, s) + weighted_norm(u0.omega, s);
        for (int d = 0; d < 3; ++d) {
            NormSpec sd = s;
            sd.derivative = MultiIndex{d == 0, d == 1, d == 2};
            e += weighted_norm(u0.rho, sd);
        }
        best = std::max(best, e);
    }
    return best;
}

// ---- rates ----

namespace rates {

namespace {

void check_p(double p) {
    if (!(p >= 1.0)) throw DomainError("rate: p must be >= 1");
}
void check_n(double n) {
    if (!(n >= 0.0 && n <= 2.0)) throw DomainError("rate: n must lie in [0,2]");
}
double inv(double p) { return is_inf(p) ? 0.0 : 1.0 / p; }
double floor1(double v) { return std::min(v, 1.0); }

}  // namespace

double r(int alpha_order, double p) {
    check_p(p);
    if (alpha_order < 0 || alpha_order > 3) throw DomainError("rate r: |alpha| must be in [0,3]");
    if (p <= 1.5) return alpha_order / 2.0;
    return 1.5 * (2.0 / 3.0 - inv(p)) + alpha_order / 2.0;
}

double ell(double n, double p, double mu) {
    check_p(p);
    check_n(n);
    if (mu < 0.0) throw DomainError("rate ell: mu must be >= 0");
    if (p <= 1.5) return 2.5 * (1.0 - inv(p)) - 0.5 + floor1(n) / 2.0 - mu;
    return (1.0 - inv(p)) + floor1(n) / 2.0 - mu;
}

double ell_tilde(double n, double p, double mu) {
    check_p(p);
    check_n(n);
    if (mu < 0.0) throw DomainError("rate ell_tilde: mu must be >= 0");
    if (p <= 1.5) return 1.5 * (1.0 - inv(p)) + (floor1(n) + floor1(mu)) / 2.0 - mu;
    return 0.5 + (floor1(n) + floor1(mu)) / 2.0 - mu;
}

double ell_hat(int k, double p, int alpha_order) {
    check_p(p);
    if (k < 1) throw DomainError("rate ell_hat: k must be >= 1");
    if (alpha_order < 0 || alpha_order > k) throw DomainError("rate ell_hat: need 0 <= |alpha| <= k");
    if (alpha_order < k || p <= 2.0) return 0.0;
    return -2.0 / 3.0 * (1.0 - inv(p)) + 1.0 / 3.0;
}

double b(double n, double p) {
    check_p(p);
    check_n(n);
    const double n1 = floor1(n);
    const double b2 = std::min(1.0 / 6.0 + n1 / 2.0, 0.3 + n1 / 10.0);
    const double binf = std::min(n1 / 2.0, 0.3 + n1 / 10.0);
    if (p <= 2.0) return b2;
    if (is_inf(p)) return binf;
    return (binf - b2) * (1.0 - 2.0 / p) + b2;
}

double frak_b(double n, double p) {
    check_p(p);
    check_n(n);
    const double n1 = floor1(n);
    const double f2 = (n1 - 1.0) / 2.0 + std::min({2.0 * n - 1.0 / 3.0, n, 0.5});
    const double finf = (n1 - 1.0) / 2.0 + std::min(n - 0.5, 0.5);
    if (p <= 2.0) return f2;
    if (is_inf(p)) return finf;
    return (finf - f2) * (1.0 - 2.0 / p) + f2;
}

double bb(double n, double p) { return std::max(b(n, p), frak_b(n, p)); }

}  // namespace rates

double rate(const std::string& name, const RateArgs& a) {
    if (name == "r") return rates::r(a.alpha, a.p);
    if (name == "ell") return rates::ell(a.n, a.p, a.mu);
    if (name == "ell_tilde") return rates::ell_tilde(a.n, a.p, a.mu);
    if (name == "ell_hat") return rates::ell_hat(a.k, a.p, a.alpha);
    if (name == "b") return rates::b(a.n, a.p);
    if (name == "frak_b") return rates::frak_b(a.n, a.p);
    if (name == "bb") return rates::bb(a.n, a.p);
    throw UsageError("unknown rate '" + name + "'");
}

// ---- fitting ----

DecayFit fit_decay(const std::vector<std::pair<double, double>>& series, double t_lo, double t_hi,
                   bool with_log) {
    if (!(t_hi > t_lo)) throw UsageError("fit_decay: empty window");
    DecayFit out;
    out.series = series;
    out.t_lo = t_lo;
    out.t_hi = t_hi;
    out.log_factor_flag = with_log;
    std::vector<std::pair<double, double>> pts;
    for (const auto& [t, y] : series) {
        if (t < t_lo || t > t_hi) continue;
        if (!(y > 0.0) || !std::isfinite(y))
            throw DataError("fit_decay: nonpositive norm " + std::to_string(y) + " at t = " + std::to_string(t));
        pts.emplace_back(t, y);
    }
    out.samples = pts.size();
    if (pts.empty()) throw UsageError("fit_decay: no samples inside the window");
    if (pts.size() < 6) throw DataError("fit_decay: fewer than 6 samples in window");
    const int cols = with_log ? 3 : 2;
    Eigen::MatrixXd A(pts.size(), cols);
    Eigen::VectorXd y(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double t = pts[i].first;
        A(i, 0) = std::log(t);
        if (with_log) A(i, 1) = std::log(std::log1p(t));
        A(i, cols - 1) = 1.0;
        y(i) = std::log(pts[i].second);
    }
    Eigen::VectorXd c = A.colPivHouseholderQr().solve(y);
    out.slope = c(0);
    out.log_coeff = with_log ? c(1) : 0.0;
    out.intercept = c(cols - 1);
    Eigen::VectorXd res = y - A * c;
    double ss_res = res.squaredNorm();
    double ss_tot = (y.array() - y.mean()).matrix().squaredNorm();
    out.r_squared = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
    return out;
}

// ---- report ----

double predicted_slope(const std::string& q, double n, double p, double mu, int alpha) {
    const double P = 1.0 - (is_inf(p) ? 0.0 : 1.0 / p);
    auto comp_of = [&](const std::string& s) {
        auto u = s.find('_');
        return u == std::string::npos ? s : s.substr(0, u);
    };
    auto part_of = [&](const std::string& s) {
        auto u = s.find('_');
        return u == std::string::npos ? std::string() : s.substr(u + 1);
    };
    const std::string comp = comp_of(q), part = part_of(q);
    if (comp != "rho" && comp != "a" && comp != "omega")
        throw UsageError("predicted_slope: unknown component in '" + q + "'");
    const double r = rates::r(alpha, p);
    const double l = rates::ell(n, p, mu), lt = rates::ell_tilde(n, p, mu);
    auto lead = [&](double extra) {
        if (comp == "rho") return -(r + l - 0.5 + extra);
        if (comp == "a") return -(r + l + extra);
        if (comp == "omega") return -(r + lt + extra);
        throw UsageError("predicted_slope: unknown component in '" + q + "'");
    };
    if (part.empty()) return lead(0.0);
    if (part == "N") return lead(rates::b(n, p));
    if (part == "NR") return lead(rates::bb(n, p));
    if (part == "err") {
        // rho - rho_app keeps the leading rate, a and omega gain 1/2
        return comp == "rho" ? -(r + l) : lead(0.5);
    }
    if (part == "H") {
        if (comp == "rho") return -2.5 * P + (1.0 - alpha) / 2.0 + mu;
        if (comp == "a") return -2.5 * P - alpha / 2.0 + mu;
        return -1.5 * P - (1.0 + alpha) / 2.0 + mu / 2.0;
    }
    if (part == "LR") {
        if (comp == "rho") return -2.5 * P + 1.0 - n / 2.0 + mu;
        if (comp == "a") return -2.5 * P + 0.5 - n / 2.0 + mu;
        return -1.5 * P - (n - mu) / 2.0;
    }
    if (part == "HP") {
        if (comp == "rho") return -2.5 * P + mu;
        if (comp == "a") return -2.5 * P + mu - 0.5;
        return -1.5 * P - 1.0 + mu;
    }
    throw UsageError("predicted_slope: unknown quantity '" + q + "'");
}

namespace {

const char* kComps[3] = {"rho", "a", "omega"};
const char* kParts[6] = {"", "_H", "_LR", "_HP", "_N", "_NR"};

double comp_norm(const CurlDivState& u, int c, const NormSpec& s) {
    if (c == 0) return weighted_norm(u.rho, s);
    if (c == 1) return weighted_norm(u.a, s);
    return weighted_norm(u.omega, s);
}

}  // namespace

ReportAccumulator::ReportAccumulator(double n, std::vector<NormSpec> specs, double t_lo, double t_hi)
    : n_(n), specs_(std::move(specs)), lo_(t_lo), hi_(t_hi) {
    floor_weight(n);
    if (!(t_hi > t_lo)) throw UsageError("theory_report: empty window");
    for (const NormSpec& s : specs_) s.validate();
}

void ReportAccumulator::add(const DecompositionSnapshot& d) {
    if (d.t < lo_ || d.t > hi_) return;
    const CurlDivState uN = d.u - d.u_L;
    const CurlDivState err = d.u - d.u_app(n_);
    const CurlDivState* parts[6] = {&d.u, &d.u_H, &d.u_LR, &d.u_HP, &uN, &d.u_NR};
    for (std::size_t si = 0; si < specs_.size(); ++si) {
        const NormSpec& s = specs_[si];
        const bool deriv = s.derivative.order() > 0;
        for (int c = 0; c < 3; ++c) {
            for (int p = 0; p < 6; ++p) {
                // remainder and Picard bounds are stated for undifferentiated fields
                if (deriv && (p == 2 || p == 3)) continue;
                std::string key = std::string(kComps[c]) + kParts[p] + "|" + std::to_string(si);
                series_[key].emplace_back(d.t, comp_norm(*parts[p], c, s));
            }
            if (n_ >= 1.0) {
                std::string key = std::string(kComps[c]) + "_err|" + std::to_string(si);
                series_[key].emplace_back(d.t, comp_norm(err, c, s));
            }
        }
    }
}

TheoryReport ReportAccumulator::finish() const {
    if (series_.empty()) throw UsageError("theory report: no snapshots inside the fit window");
    TheoryReport rep;
    for (std::size_t si = 0; si < specs_.size(); ++si) {
        const NormSpec& s = specs_[si];
        for (int c = 0; c < 3; ++c) {
            std::vector<std::string> qs;
            for (int p = 0; p < 6; ++p) qs.push_back(std::string(kComps[c]) + kParts[p]);
            if (n_ >= 1.0) qs.push_back(std::string(kComps[c]) + "_err");
            const auto full = series_.find(std::string(kComps[c]) + "|" + std::to_string(si));
            double full_peak = 0.0;
            if (full != series_.end())
                for (const auto& pt : full->second) full_peak = std::max(full_peak, pt.second);
            for (const std::string& q : qs) {
                auto it = series_.find(q + "|" + std::to_string(si));
                if (it == series_.end()) continue;
                ReportRow row{q, s.p, s.mu, s.derivative.order(), lo_, hi_, 0.0, 0.0, 0.0, "vacuous"};
                row.predicted = predicted_slope(q, n_, s.p, s.mu, s.derivative.order());
                double peak = 0.0;
                for (const auto& pt : it->second) peak = std::max(peak, pt.second);
                if (peak > 1e-12 * full_peak && peak > 0.0) {
                    DecayFit f = fit_decay(it->second, lo_, hi_, false);
                    row.slope = f.slope;
                    row.margin = row.predicted - f.slope;
                    row.verdict = f.slope <= row.predicted + kReportTolerance ? "pass" : "fail";
                }
                rep.rows.push_back(row);
            }
        }
    }
    return rep;
}

TheoryReport theory_report(const std::vector<DecompositionSnapshot>& decomp, double n,
                           const std::vector<NormSpec>& specs, double t_lo, double t_hi) {
    ReportAccumulator acc(n, specs, t_lo, t_hi);
    for (const auto& d : decomp) acc.add(d);
    return acc.finish();
}

std::string TheoryReport::csv() const {
    std::ostringstream os;
    os << "quantity,p,mu,alpha,window_lo,window_hi,slope,predicted,margin,pass\n";
    for (const ReportRow& r : rows) {
        bool vac = r.verdict == "vacuous";
        os << r.quantity << "," << fmt_num(r.p) << "," << fmt_num(r.mu) << "," << r.alpha << ","
           << fmt_num(r.window_lo) << "," << fmt_num(r.window_hi) << "," << (vac ? "" : fmt_num(r.slope)) << ","
           << fmt_num(r.predicted) << "," << (vac ? "" : fmt_num(r.margin)) << "," << r.verdict << "\n";
    }
    return os.str();
}

std::string TheoryReport::text() const {
    std::ostringstream os;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-12s %6s %6s %5s %10s %10s %10s  %s\n", "quantity", "p", "mu", "alpha",
                  "slope", "predicted", "margin", "verdict");
    os << buf;
    for (const ReportRow& r : rows) {
        if (r.verdict == "vacuous") {
            std::snprintf(buf, sizeof buf, "%-12s %6s %6.2f %5d %10s %10.4f %10s  %s\n", r.quantity.c_str(),
                          fmt_num(r.p).c_str(), r.mu, r.alpha, "-", r.predicted, "-", "vacuous");
        } else {
            std::snprintf(buf, sizeof buf, "%-12s %6s %6.2f %5d %10.4f %10.4f %10.4f  %s\n", r.quantity.c_str(),
                          fmt_num(r.p).c_str(), r.mu, r.alpha, r.slope, r.predicted, r.margin, r.verdict.c_str());
        }
        os << buf;
    }
    return os.str();
}

bool TheoryReport::all_pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.verdict != "fail"; });
}

}  // namespace mcns
