#include "mcns/hermite.hpp"

#include <cmath>
#include <cstdio>

#include "json.hpp"
#include "mcns/errors.hpp"

namespace mcns {

namespace {

const cplx I(0.0, 1.0);

double factorial(int k) {
    double r = 1.0;
    for (int i = 2; i <= k; ++i) r *= i;
    return r;
}

// probabilists' Hermite He_k(y)
double he(int k, double y) {
    if (k == 0) return 1.0;
    double hm = 1.0, h = y;
    for (int m = 1; m < k; ++m) {
        double hn = y * h - m * hm;
        hm = h;
        h = hn;
    }
    return h;
}

cplx deriv_symbol(const Vec3& xi, const MultiIndex& a) {
    cplx r = 1.0;
    for (int d = 0; d < 3; ++d)
        for (int q = 0; q < a[d]; ++q) r *= I * xi[d];
    return r;
}

void check_order(const MultiIndex& a, const char* who) {
    if (a.a1 < 0 || a.a2 < 0 || a.a3 < 0)
        throw UsageError(std::string(who) + ": negative multi-index entry");
    if (a.order() > kMaxHermiteOrder)
        throw UnsupportedOrderError(std::string(who) + ": order " + std::to_string(a.order()) +
                                    " exceeds " + std::to_string(kMaxHermiteOrder));
}

ScalarField phi0_hat(const GridSpec& g) { return forward_transform(ScalarField::sample(g, phi0)); }

ScalarField as_physical(const ScalarField& f) {
    return f.rep == Rep::Physical ? f : inverse_transform(f);
}
ScalarField as_spectral(const ScalarField& f) {
    return f.rep == Rep::Spectral ? f : forward_transform(f);
}

bool on_face(const GridSpec& g, int i, int j, int k) {
    const int n = g.n();
    return i == 0 || j == 0 || k == 0 || i == n - 1 || j == n - 1 || k == n - 1;
}

MultiIndex plus_axis(MultiIndex a, int d) {
    if (d == 0) ++a.a1;
    else if (d == 1) ++a.a2;
    else ++a.a3;
    return a;
}

}  // namespace

// ---- multi-indices ----

std::string MultiIndex::key() const {
    return "(" + std::to_string(a1) + "," + std::to_string(a2) + "," + std::to_string(a3) + ")";
}

MultiIndex MultiIndex::parse(const std::string& s) {
    MultiIndex m;
    char tail = 0;
    if (std::sscanf(s.c_str(), " (%d,%d,%d%c", &m.a1, &m.a2, &m.a3, &tail) != 4 || tail != ')')
        throw FormatError("MultiIndex: cannot parse '" + s + "'");
    return m;
}

std::vector<MultiIndex> multi_indices_upto(int max_order) {
    std::vector<MultiIndex> out;
    for (int o = 0; o <= max_order; ++o)
        for (int a = o; a >= 0; --a)
            for (int b = o - a; b >= 0; --b) out.push_back({a, b, o - a - b});
    return out;
}

int floor_weight(double n) {
    if (!(n >= 0.0 && n <= 2.0)) throw DomainError("weight n must lie in [0,2]");
    return int(std::floor(n));
}

// ---- Gaussians and Hermite polynomials ----

double phi0(const Vec3& x) {
    return std::pow(4.0 * M_PI, -1.5) * std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / 4.0);
}

double gaussian_derivative(const MultiIndex& alpha, const Vec3& x, double s) {
    if (!(s > 0.0)) throw DomainError("gaussian_derivative: s must be positive");
    // d^k e^{-x^2/4s} = (-1)^k (2s)^{-k/2} He_k(x/sqrt(2s)) e^{-x^2/4s}
    double r = std::pow(4.0 * M_PI * s, -1.5);
    const double sc = std::sqrt(2.0 * s);
    for (int d = 0; d < 3; ++d) {
        int k = alpha[d];
        double y = x[d] / sc;
        r *= (k % 2 ? -1.0 : 1.0) * std::pow(sc, -k) * he(k, y) * std::exp(-0.5 * y * y);
    }
    return r;
}

double hermite_poly(const MultiIndex& alpha, const Vec3& x) {
    check_order(alpha, "hermite_poly");
    double r = 1.0;
    for (int d = 0; d < 3; ++d) {
        int k = alpha[d];
        r *= std::pow(2.0, k) / factorial(k) * (k % 2 ? -1.0 : 1.0) * std::pow(2.0, -0.5 * k) *
             he(k, x[d] / std::sqrt(2.0));
    }
    return r;
}

double moment_coeff(const ScalarField& f_in, const MultiIndex& alpha) {
    check_order(alpha, "moment_coeff");
    ScalarField f = as_physical(f_in);
    const GridSpec& g = f.grid;
    const int n = g.n();
    double peak = 0.0, face = 0.0, sum = 0.0;
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                double v = f.v[g.index(i, j, k)].real();
                peak = std::max(peak, std::abs(v));
                if (on_face(g, i, j, k)) face = std::max(face, std::abs(v));
                sum += hermite_poly(alpha, {g.coord(i), g.coord(j), g.coord(k)}) * v;
            }
    if (face > 1e-12 * peak)
        throw TruncationDomainError("moment_coeff: field not decayed at box faces (face/peak = " +
                                    std::to_string(face / peak) + ")");
    double h = g.h();
    return h * h * h * sum;
}

ScalarField heat_profile(const GridSpec& g, const MultiIndex& alpha, double nu, double t) {
    check_order(alpha, "heat_profile");
    ScalarField out = apply_heat(phi0_hat(g), nu, t);
    if (alpha.order() > 0)
        for (std::size_t i = 0; i < out.size(); ++i) out.v[i] *= deriv_symbol(g.xi_at(i), alpha);
    return out;
}

// ---- expansions ----

ScalarApprox scalar_hermite_approx(const ScalarField& u0, double n, double nu, double t) {
    if (t < 0.0) throw DomainError("scalar_hermite_approx: t must be >= 0");
    const int N = floor_weight(n);
    const GridSpec& g = u0.grid;
    ScalarApprox out{ScalarField(g, Rep::Spectral), ScalarField(g, Rep::Spectral), {}};
    ScalarField base = apply_heat(phi0_hat(g), nu, t);
    for (const MultiIndex& a : multi_indices_upto(N)) {
        double c = moment_coeff(u0, a);
        out.coeffs[a] = c;
        for (std::size_t i = 0; i < base.size(); ++i)
            out.approx.v[i] += c * deriv_symbol(g.xi_at(i), a) * base.v[i];
    }
    out.remainder = apply_heat(as_spectral(u0), nu, t) - out.approx;
    return out;
}

HypParaApprox hyp_para_hermite_approx(const ScalarField& rho0, const ScalarField& a0, double n,
                                      const PhysicalParams& params, double t) {
    if (t < 0.0) throw DomainError("hyp_para_hermite_approx: t must be >= 0");
    if (rho0.grid != a0.grid) throw UsageError("hyp_para_hermite_approx: grid mismatch");
    const int N = floor_weight(n);
    const GridSpec& g = rho0.grid;
    HypParaApprox out;
    ScalarField p = phi0_hat(g);
    // moment-weighted derivatives of phi0 feed profile 1 (rho slot) and profile 2 (a slot)
    ScalarField s1(g, Rep::Spectral), s2(g, Rep::Spectral);
    for (const MultiIndex& a : multi_indices_upto(N)) {
        double cr = moment_coeff(rho0, a);
        double ca = moment_coeff(a0, a);
        out.rho_coeffs[a] = cr;
        out.a_coeffs[a] = ca;
        for (std::size_t i = 0; i < p.size(); ++i) {
            cplx d = deriv_symbol(g.xi_at(i), a) * p.v[i];
            s1.v[i] += cr * d;
            s2.v[i] += ca * d;
        }
    }
    std::tie(out.rho_H, out.a_H) = apply_heat_wave(s1, s2, params, t);
    auto [rl, al] = apply_heat_wave(as_spectral(rho0), as_spectral(a0), params, t);
    out.rho_LR = rl - out.rho_H;
    out.a_LR = al - out.a_H;
    return out;
}

// ---- divergence-free basis rows ----

const std::vector<Table1Row>& table1_rows() {
    static const std::vector<Table1Row> rows = {
        {{1, 1, 0}, 1, {0, 0, 0}, 2}, {{1, 0, 1}, 1, {0, 0, 0}, 1}, {{0, 1, 1}, 1, {0, 0, 0}, 0},
        {{2, 1, 0}, 1, {1, 0, 0}, 2}, {{1, 2, 0}, 1, {0, 1, 0}, 2}, {{2, 0, 1}, 1, {1, 0, 0}, 1},
        {{1, 0, 2}, 1, {0, 0, 1}, 1}, {{0, 2, 1}, 1, {0, 1, 0}, 0}, {{0, 1, 2}, 1, {0, 0, 1}, 0},
        {{1, 1, 1}, 1, {0, 0, 1}, 2}, {{1, 1, 1}, 2, {1, 0, 0}, 0},
    };
    return rows;
}

namespace {

Vec3 table1_p(int row, const Vec3& x) {
    const double x1 = x[0], x2 = x[1], x3 = x[2];
    switch (row) {
        case 0: return {-0.5 * x2, 0.5 * x1, 0.0};
        case 1: return {0.5 * x3, 0.0, -0.5 * x1};
        case 2: return {0.0, -0.5 * x3, 0.5 * x2};
        case 3: return {0.5 * x1 * x2, -0.25 * x1 * x1, 0.0};
        case 4: return {0.25 * x2 * x2, -0.5 * x1 * x2, 0.0};
        case 5: return {-0.5 * x1 * x3, 0.0, 0.25 * x1 * x1};
        case 6: return {-0.25 * x3 * x3, 0.0, 0.5 * x1 * x3};
        case 7: return {0.0, 0.5 * x2 * x3, -0.25 * x2 * x2};
        case 8: return {0.0, 0.25 * x3 * x3, -0.5 * x2 * x3};
        case 9: return {x2 * x3, 0.0, 0.0};
        default: return {0.0, 0.0, -x1 * x2};
    }
}

// curl(F e_k)_i = eps_{ijk} d_j F
Vec3 curl_of_axis(const MultiIndex& beta, int k, const Vec3& x, double s) {
    Vec3 out{0.0, 0.0, 0.0};
    int i1 = (k + 1) % 3, i2 = (k + 2) % 3;
    // eps_{i1 i2 k} = 1, eps_{i2 i1 k} = -1
    out[i1] = gaussian_derivative(plus_axis(beta, i2), x, s);
    out[i2] = -gaussian_derivative(plus_axis(beta, i1), x, s);
    return out;
}

int row_index(const MultiIndex& a, int j) {
    const auto& rows = table1_rows();
    for (std::size_t r = 0; r < rows.size(); ++r)
        if (rows[r].alpha == a && rows[r].j == j) return int(r);
    return -1;
}

}  // namespace

Table1Profile table1_profiles(const MultiIndex& alpha_tilde, int j) {
    Table1Profile out;
    int r = row_index(alpha_tilde, j);
    if (r < 0) {
        out.p = [](const Vec3&) { return Vec3{0.0, 0.0, 0.0}; };
        out.f = out.p;
        return out;
    }
    const Table1Row row = table1_rows()[r];
    out.zero = false;
    out.p = [r](const Vec3& x) { return table1_p(r, x); };
    out.f = [row](const Vec3& x) { return curl_of_axis(row.deriv, row.axis, x, 1.0); };
    return out;
}

VectorField3 table1_field(const GridSpec& g, const Table1Row& row, double eps, double t) {
    ScalarField F = apply_heat(phi0_hat(g), eps, t);
    for (std::size_t i = 0; i < F.size(); ++i) F.v[i] *= deriv_symbol(g.xi_at(i), row.deriv);
    VectorField3 out = VectorField3::zeros(g, Rep::Spectral);
    const int k = row.axis, i1 = (k + 1) % 3, i2 = (k + 2) % 3;
    for (std::size_t i = 0; i < F.size(); ++i) {
        Vec3 xi = g.xi_at(i);
        out[i1].v[i] = I * xi[i2] * F.v[i];
        out[i2].v[i] = -I * xi[i1] * F.v[i];
    }
    return out;
}

double divfree_coeff(const VectorField3& omega_in, const Table1Row& row) {
    omega_in.check_consistent();
    VectorField3 omega = omega_in.rep() == Rep::Physical ? omega_in : inverse_transform(omega_in);
    const GridSpec& g = omega.grid();
    const int n = g.n();
    int r = row_index(row.alpha, row.j);
    double peak = 0.0, face = 0.0, sum = 0.0;
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                std::size_t idx = g.index(i, j, k);
                Vec3 p = table1_p(r, {g.coord(i), g.coord(j), g.coord(k)});
                double v = p[0] * omega[0].v[idx].real() + p[1] * omega[1].v[idx].real() +
                           p[2] * omega[2].v[idx].real();
                peak = std::max(peak, std::abs(v));
                if (on_face(g, i, j, k)) face = std::max(face, std::abs(v));
                sum += v;
            }
    if (face > 1e-12 * peak)
        throw TruncationDomainError("divfree_coeff: p.omega not decayed at box faces (face/peak = " +
                                    std::to_string(face / peak) + ")");
    double h = g.h();
    return h * h * h * sum;
}

DivfreeApprox divfree_hermite_approx(const VectorField3& omega0, double n, const PhysicalParams& params,
                                     double t) {
    if (t < 0.0) throw DomainError("divfree_hermite_approx: t must be >= 0");
    omega0.check_consistent();
    const int N = floor_weight(n);
    const GridSpec& g = omega0.grid();
    DivfreeApprox out{VectorField3::zeros(g, Rep::Spectral), VectorField3::zeros(g, Rep::Spectral), {}};
    for (const Table1Row& row : table1_rows()) {
        if (row.alpha.order() > N + 1) continue;
        double c = divfree_coeff(omega0, row);
        out.coeffs[{row.alpha, row.j}] = c;
        if (c != 0.0) out.omega_H += c * table1_field(g, row, params.epsilon, t);
    }
    VectorField3 w0 = omega0.rep() == Rep::Spectral ? omega0 : forward_transform(omega0);
    out.omega_LR = apply_heat(w0, params, t) - out.omega_H;
    return out;
}

// ---- coefficient sets ----

HermiteCoefficientSet HermiteCoefficientSet::compute(const ScalarField& rho0, const ScalarField& a0,
                                                     const VectorField3& omega0, double n) {
    const int N = floor_weight(n);
    HermiteCoefficientSet s;
    for (const MultiIndex& a : multi_indices_upto(N)) {
        s.rho[a] = moment_coeff(rho0, a);
        s.a[a] = moment_coeff(a0, a);
    }
    for (const Table1Row& row : table1_rows())
        if (row.alpha.order() <= N + 1) s.divfree[{row.alpha, row.j}] = divfree_coeff(omega0, row);
    return s;
}

std::string HermiteCoefficientSet::to_json() const {
    nlohmann::ordered_json j;
    nlohmann::ordered_json r = nlohmann::ordered_json::object(), a = nlohmann::ordered_json::object(),
                           d = nlohmann::ordered_json::object();
    for (const auto& [k, v] : rho) r[k.key()] = v;
    for (const auto& [k, v] : this->a) a[k.key()] = v;
    for (const auto& [k, v] : divfree) d[k.first.key() + "|" + std::to_string(k.second)] = v;
    j["scalar"]["rho"] = r;
    j["scalar"]["a"] = a;
    j["divfree"] = d;
    return j.dump(2);
}

HermiteCoefficientSet HermiteCoefficientSet::from_json(const std::string& text) {
    HermiteCoefficientSet s;
    try {
        auto j = nlohmann::json::parse(text);
        for (auto& [k, v] : j.at("scalar").at("rho").items()) s.rho[MultiIndex::parse(k)] = v.get<double>();
        for (auto& [k, v] : j.at("scalar").at("a").items()) s.a[MultiIndex::parse(k)] = v.get<double>();
        for (auto& [k, v] : j.at("divfree").items()) {
            auto bar = k.find('|');
            if (bar == std::string::npos) throw FormatError("divfree key without branch: " + k);
            s.divfree[{MultiIndex::parse(k.substr(0, bar)), std::stoi(k.substr(bar + 1))}] = v.get<double>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("HermiteCoefficientSet: ") + e.what());
    }
    return s;
}

}  // namespace mcns
