#include "mcns/fourier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include "mcns/errors.hpp"

namespace mcns {

GridSpec::GridSpec(int n_points, double box_length) : n_(n_points), L_(box_length) {
    if (n_points < 8 || n_points % 2 != 0)
        throw UsageError("grid: n_points must be even and >= 8, got " + std::to_string(n_points));
    if (!(box_length > 0.0) || !std::isfinite(box_length))
        throw UsageError("grid: box_length must be positive");
}

GridSpec GridSpec::from_axes(const std::array<int, 3>& n, const std::array<double, 3>& L) {
    if (n[0] != n[1] || n[1] != n[2] || L[0] != L[1] || L[1] != L[2])
        throw UsageError("grid: only cubic isotropic grids are supported");
    return GridSpec(n[0], L[0]);
}

double GridSpec::xi(int idx) const { return 2.0 * M_PI * wavenumber(idx) / L_; }

Vec3 GridSpec::xi_at(std::size_t flat) const {
    int i, j, k;
    unflatten(flat, i, j, k);
    return {xi(i), xi(j), xi(k)};
}

Vec3 GridSpec::x_at(std::size_t flat) const {
    int i, j, k;
    unflatten(flat, i, j, k);
    return {coord(i), coord(j), coord(k)};
}

std::size_t GridSpec::negate(std::size_t flat) const {
    int i, j, k;
    unflatten(flat, i, j, k);
    auto neg = [this](int q) { return q == 0 ? 0 : n_ - q; };
    return index(neg(i), neg(j), neg(k));
}

ScalarField::ScalarField(const GridSpec& g, Rep r) : grid(g), rep(r), v(g.size(), cplx(0.0, 0.0)) {}

ScalarField ScalarField::sample(const GridSpec& g, const std::function<double(const Vec3&)>& f) {
    ScalarField out(g, Rep::Physical);
    const int n = g.n();
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                out.v[g.index(i, j, k)] = f({g.coord(i), g.coord(j), g.coord(k)});
    return out;
}

cplx ScalarField::zero_mode() const {
    if (rep != Rep::Spectral) throw UsageError("zero_mode: field is not spectral");
    return v[0];
}

static void check_same(const ScalarField& a, const ScalarField& b) {
    if (a.grid != b.grid || a.rep != b.rep)
        throw UsageError("field arithmetic: grid or representation mismatch");
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
    check_same(*this, o);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += o.v[i];
    real_valued = real_valued && o.real_valued;
    return *this;
}
ScalarField& ScalarField::operator-=(const ScalarField& o) {
    check_same(*this, o);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= o.v[i];
    real_valued = real_valued && o.real_valued;
    return *this;
}
ScalarField& ScalarField::operator*=(double s) {
    for (auto& z : v) z *= s;
    return *this;
}
ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

VectorField3::VectorField3(ScalarField x, ScalarField y, ScalarField z)
    : c{std::move(x), std::move(y), std::move(z)} {
    check_consistent();
}

VectorField3 VectorField3::zeros(const GridSpec& g, Rep r) {
    return VectorField3(ScalarField(g, r), ScalarField(g, r), ScalarField(g, r));
}

VectorField3 VectorField3::sample(const GridSpec& g, const std::function<Vec3(const Vec3&)>& f) {
    VectorField3 out = zeros(g, Rep::Physical);
    const int n = g.n();
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                std::size_t idx = g.index(i, j, k);
                Vec3 val = f({g.coord(i), g.coord(j), g.coord(k)});
                for (int d = 0; d < 3; ++d) out.c[d].v[idx] = val[d];
            }
    return out;
}

void VectorField3::check_consistent() const {
    for (int d = 1; d < 3; ++d)
        if (c[d].grid != c[0].grid || c[d].rep != c[0].rep)
            throw UsageError("VectorField3: components must share grid and representation");
}

VectorField3& VectorField3::operator+=(const VectorField3& o) {
    for (int d = 0; d < 3; ++d) c[d] += o.c[d];
    return *this;
}
VectorField3& VectorField3::operator-=(const VectorField3& o) {
    for (int d = 0; d < 3; ++d) c[d] -= o.c[d];
    return *this;
}
VectorField3& VectorField3::operator*=(double s) {
    for (int d = 0; d < 3; ++d) c[d] *= s;
    return *this;
}
VectorField3 operator+(VectorField3 a, const VectorField3& b) { return a += b; }
VectorField3 operator-(VectorField3 a, const VectorField3& b) { return a -= b; }
VectorField3 operator*(double s, VectorField3 a) { return a *= s; }

// ---- FFT plumbing ----

namespace {

struct PlanPair {
    fftw_plan fwd;
    fftw_plan bwd;
};

std::mutex g_plan_mutex;
int g_threads = 1;
bool g_threads_init = false;

std::map<std::pair<int, int>, PlanPair>& plan_cache() {
    static std::map<std::pair<int, int>, PlanPair> cache;
    return cache;
}

const PlanPair& plans_for(int n) {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    auto key = std::make_pair(n, g_threads);
    auto& cache = plan_cache();
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    if (!g_threads_init) {
        fftw_init_threads();
        g_threads_init = true;
    }
    fftw_plan_with_nthreads(g_threads);
    std::size_t N = std::size_t(n) * n * n;
    auto* buf = static_cast<fftw_complex*>(fftw_malloc(N * sizeof(fftw_complex)));
    PlanPair p;
    p.fwd = fftw_plan_dft_3d(n, n, n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    p.bwd = fftw_plan_dft_3d(n, n, n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_free(buf);
    if (!p.fwd || !p.bwd) throw NumericError("fftw planning failed for n=" + std::to_string(n));
    return cache.emplace(key, p).first->second;
}

// (-1)^(i+j+k) maps index-origin FFT coefficients to box-centred coordinates
void apply_checkerboard(const GridSpec& g, cplx* data, double scale) {
    const int n = g.n();
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) {
            cplx* row = data + g.index(0, j, k);
            double s0 = ((j + k) % 2 == 0) ? scale : -scale;
            for (int i = 0; i < n; i += 2) {
                row[i] *= s0;
                row[i + 1] *= -s0;
            }
        }
}

}  // namespace

void set_fft_threads(int n) {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    g_threads = std::max(1, n);
}

int fft_threads() { return g_threads; }

void fft_raw(const GridSpec& g, cplx* data, int sign) {
    const PlanPair& p = plans_for(g.n());
    auto* d = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(sign < 0 ? p.fwd : p.bwd, d, d);
}

ScalarField forward_transform(const ScalarField& f) {
    if (f.rep != Rep::Physical) throw UsageError("forward_transform: input must be physical");
    ScalarField out = f;
    out.rep = Rep::Spectral;
    fft_raw(f.grid, out.v.data(), -1);
    apply_checkerboard(f.grid, out.v.data(), 1.0 / double(f.grid.size()));
    return out;
}

ScalarField inverse_transform(const ScalarField& f) {
    if (f.rep != Rep::Spectral) throw UsageError("inverse_transform: input must be spectral");
    ScalarField out = f;
    out.rep = Rep::Physical;
    apply_checkerboard(f.grid, out.v.data(), 1.0);
    fft_raw(f.grid, out.v.data(), +1);
    return out;
}

VectorField3 forward_transform(const VectorField3& f) {
    f.check_consistent();
    return VectorField3(forward_transform(f.c[0]), forward_transform(f.c[1]), forward_transform(f.c[2]));
}

VectorField3 inverse_transform(const VectorField3& f) {
    f.check_consistent();
    return VectorField3(inverse_transform(f.c[0]), inverse_transform(f.c[1]), inverse_transform(f.c[2]));
}

ScalarField apply_multiplier(const ScalarField& f, const std::function<cplx(const Vec3&)>& m) {
    if (f.rep != Rep::Spectral) throw UsageError("apply_multiplier: input must be spectral");
    ScalarField out = f;
    for (std::size_t idx = 0; idx < f.size(); ++idx) {
        Vec3 xi = f.grid.xi_at(idx);
        cplx mv = m(xi);
        if (!std::isfinite(mv.real()) || !std::isfinite(mv.imag())) {
            std::ostringstream os;
            os << "apply_multiplier: non-finite multiplier at xi=(" << xi[0] << ", " << xi[1] << ", "
               << xi[2] << ")";
            throw NumericError(os.str());
        }
        out.v[idx] *= mv;
    }
    // a generic complex multiplier need not preserve conjugate symmetry
    out.real_valued = false;
    return out;
}

bool dealias_keep(const GridSpec& g, int i, int j, int k) {
    const int n = g.n();
    auto ok = [&](int idx) { return 3 * std::abs(g.wavenumber(idx)) <= n; };
    return ok(i) && ok(j) && ok(k);
}

ScalarField dealias(const ScalarField& f) {
    if (f.rep != Rep::Spectral) throw UsageError("dealias: input must be spectral");
    ScalarField out = f;
    const int n = f.grid.n();
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                if (!dealias_keep(f.grid, i, j, k)) out.v[f.grid.index(i, j, k)] = 0.0;
    return out;
}

VectorField3 dealias(const VectorField3& f) {
    return VectorField3(dealias(f.c[0]), dealias(f.c[1]), dealias(f.c[2]));
}

double l2_coeff_norm(const ScalarField& f) {
    double s = 0.0;
    for (const auto& z : f.v) s += std::norm(z);
    return std::sqrt(s);
}

double l2_coeff_norm(const VectorField3& f) {
    double s = 0.0;
    for (int d = 0; d < 3; ++d) {
        double q = l2_coeff_norm(f.c[d]);
        s += q * q;
    }
    return std::sqrt(s);
}

double max_abs(const ScalarField& f) {
    double m = 0.0;
    for (const auto& z : f.v) m = std::max(m, std::abs(z));
    return m;
}

double rel_l2_diff(const ScalarField& a, const ScalarField& b) {
    check_same(a, b);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::norm(a.v[i] - b.v[i]);
        den += std::norm(b.v[i]);
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

double rel_l2_diff(const VectorField3& a, const VectorField3& b) {
    double num = 0.0, den = 0.0;
    for (int d = 0; d < 3; ++d) {
        check_same(a.c[d], b.c[d]);
        for (std::size_t i = 0; i < a.c[d].size(); ++i) {
            num += std::norm(a.c[d].v[i] - b.c[d].v[i]);
            den += std::norm(b.c[d].v[i]);
        }
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

double conjugate_symmetry_defect(const ScalarField& f) {
    if (f.rep != Rep::Spectral) throw UsageError("conjugate_symmetry_defect: input must be spectral");
    double peak = max_abs(f);
    if (peak == 0.0) return 0.0;
    double worst = 0.0;
    for (std::size_t idx = 0; idx < f.size(); ++idx) {
        std::size_t m = f.grid.negate(idx);
        worst = std::max(worst, std::abs(f.v[m] - std::conj(f.v[idx])));
    }
    return worst / peak;
}

// ---- snapshots ----

namespace {

template <class T>
void put_le(std::ostream& os, T value) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::istream& is, const std::string& path) {
    unsigned char bytes[sizeof(T)];
    if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T)))
        throw FormatError("snapshot " + path + ": truncated file");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

}  // namespace

void write_snapshot(const std::string& path, const ScalarField& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw FormatError("snapshot " + path + ": cannot open for writing");
    os.write("MCNS", 4);
    put_le<std::uint32_t>(os, 1u);
    put_le<std::uint32_t>(os, std::uint32_t(f.grid.n()));
    put_le<double>(os, f.grid.L());
    put_le<std::uint8_t>(os, static_cast<std::uint8_t>(f.rep));
    for (const auto& z : f.v) {
        put_le<double>(os, z.real());
        put_le<double>(os, z.imag());
    }
    if (!os) throw FormatError("snapshot " + path + ": write failed");
}

ScalarField read_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("snapshot " + path + ": cannot open");
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, "MCNS", 4) != 0)
        throw FormatError("snapshot " + path + ": bad magic (expected MCNS)");
    auto version = get_le<std::uint32_t>(is, path);
    if (version != 1) throw FormatError("snapshot " + path + ": unsupported version " + std::to_string(version));
    auto n = get_le<std::uint32_t>(is, path);
    double L = get_le<double>(is, path);
    auto rep = get_le<std::uint8_t>(is, path);
    if (rep > 1) throw FormatError("snapshot " + path + ": bad representation byte");
    GridSpec g;
    try {
        g = GridSpec(int(n), L);
    } catch (const UsageError& e) {
        throw FormatError("snapshot " + path + ": " + e.what());
    }
    ScalarField f(g, static_cast<Rep>(rep));
    for (auto& z : f.v) {
        double re = get_le<double>(is, path);
        double im = get_le<double>(is, path);
        z = cplx(re, im);
    }
    return f;
}

}  // namespace mcns
