#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <new>
#include <string>
#include <vector>

namespace mcns {

using cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;

template <class T>
struct AlignedAllocator {
    using value_type = T;
    AlignedAllocator() = default;
    template <class U>
    AlignedAllocator(const AlignedAllocator<U>&) {}
    T* allocate(std::size_t n) {
        std::size_t bytes = ((n * sizeof(T) + 63) / 64) * 64;
        void* p = std::aligned_alloc(64, bytes == 0 ? 64 : bytes);
        if (!p) throw std::bad_alloc();
        return static_cast<T*>(p);
    }
    void deallocate(T* p, std::size_t) { std::free(p); }
    template <class U>
    bool operator==(const AlignedAllocator<U>&) const { return true; }
};

using CVec = std::vector<cplx, AlignedAllocator<cplx>>;
using RVec = std::vector<double, AlignedAllocator<double>>;

// Cubic periodic box [-L/2, L/2)^3 with n points per axis.
class GridSpec {
public:
    GridSpec() = default;
    GridSpec(int n_points, double box_length);
    // per-axis form; rejects anything that is not cubic
    static GridSpec from_axes(const std::array<int, 3>& n, const std::array<double, 3>& L);

    int n() const { return n_; }
    double L() const { return L_; }
    double h() const { return L_ / n_; }
    std::size_t size() const { return std::size_t(n_) * n_ * n_; }

    // x fastest
    std::size_t index(int i, int j, int k) const {
        return (std::size_t(k) * n_ + j) * n_ + i;
    }
    void unflatten(std::size_t idx, int& i, int& j, int& k) const {
        i = int(idx % n_);
        j = int((idx / n_) % n_);
        k = int(idx / (std::size_t(n_) * n_));
    }
    // signed wavenumber index in [-n/2, n/2-1]
    int wavenumber(int idx) const { return idx < n_ / 2 ? idx : idx - n_; }
    double xi(int idx) const;
    double coord(int idx) const { return -0.5 * L_ + idx * h(); }
    Vec3 xi_at(std::size_t flat) const;
    Vec3 x_at(std::size_t flat) const;
    // flat index of -k
    std::size_t negate(std::size_t flat) const;

    bool operator==(const GridSpec& o) const { return n_ == o.n_ && L_ == o.L_; }
    bool operator!=(const GridSpec& o) const { return !(*this == o); }

private:
    int n_ = 0;
    double L_ = 0.0;
};

enum class Rep : std::uint8_t { Physical = 0, Spectral = 1 };

struct ScalarField {
    GridSpec grid;
    Rep rep = Rep::Physical;
    bool real_valued = true;
    CVec v;

    ScalarField() = default;
    ScalarField(const GridSpec& g, Rep r);
    static ScalarField zeros(const GridSpec& g, Rep r) { return ScalarField(g, r); }
    static ScalarField sample(const GridSpec& g, const std::function<double(const Vec3&)>& f);

    std::size_t size() const { return v.size(); }
    cplx& operator[](std::size_t i) { return v[i]; }
    const cplx& operator[](std::size_t i) const { return v[i]; }
    cplx zero_mode() const;

    ScalarField& operator+=(const ScalarField& o);
    ScalarField& operator-=(const ScalarField& o);
    ScalarField& operator*=(double s);
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

struct VectorField3 {
    std::array<ScalarField, 3> c;

    VectorField3() = default;
    VectorField3(ScalarField x, ScalarField y, ScalarField z);
    static VectorField3 zeros(const GridSpec& g, Rep r);
    static VectorField3 sample(const GridSpec& g, const std::function<Vec3(const Vec3&)>& f);

    ScalarField& operator[](int i) { return c[i]; }
    const ScalarField& operator[](int i) const { return c[i]; }
    const GridSpec& grid() const { return c[0].grid; }
    Rep rep() const { return c[0].rep; }
    // throws UsageError if components disagree on grid or representation
    void check_consistent() const;

    VectorField3& operator+=(const VectorField3& o);
    VectorField3& operator-=(const VectorField3& o);
    VectorField3& operator*=(double s);
};

VectorField3 operator+(VectorField3 a, const VectorField3& b);
VectorField3 operator-(VectorField3 a, const VectorField3& b);
VectorField3 operator*(double s, VectorField3 a);

// u_hat(xi) = n^{-3} sum_x f(x) e^{-i xi.x}, x the physical box coordinates.
ScalarField forward_transform(const ScalarField& f);
ScalarField inverse_transform(const ScalarField& f);
VectorField3 forward_transform(const VectorField3& f);
VectorField3 inverse_transform(const VectorField3& f);

ScalarField apply_multiplier(const ScalarField& f, const std::function<cplx(const Vec3&)>& m);
ScalarField dealias(const ScalarField& f);
VectorField3 dealias(const VectorField3& f);
bool dealias_keep(const GridSpec& g, int i, int j, int k);

// FFT threads (FFTW threads backend); 1 by default
void set_fft_threads(int n);
int fft_threads();

// Raw unnormalized in-place FFT over box index coordinates (no phase, no 1/n^3).
// sign = -1 forward, +1 backward.
void fft_raw(const GridSpec& g, cplx* data, int sign);

// Norm helpers on coefficient arrays
double l2_coeff_norm(const ScalarField& f);  // sqrt(sum |c|^2)
double max_abs(const ScalarField& f);
double rel_l2_diff(const ScalarField& a, const ScalarField& b);
double rel_l2_diff(const VectorField3& a, const VectorField3& b);
double l2_coeff_norm(const VectorField3& f);

// Max deviation from conjugate symmetry relative to the largest coefficient.
double conjugate_symmetry_defect(const ScalarField& f);

// Snapshot files: "MCNS", u32 version=1, u32 n, f64 L, u8 rep, n^3 (f64 re, f64 im), little endian.
void write_snapshot(const std::string& path, const ScalarField& f);
ScalarField read_snapshot(const std::string& path);

}  // namespace mcns
