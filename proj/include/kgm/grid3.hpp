#pragma once
// Periodic cube arithmetic: spectral derivatives, Poisson inversion, the
// divergence-free projection, and the 2/3 dealias mask.
//
// Storage is row-major with the last axis fastest, coordinates centered so
// x_a(i) = -L/2 + i h.  Wavenumbers follow the signed c2c layout
// s(m) = m for m <= n/2, m - n otherwise, giving s in {-n/2+1 .. n/2}.
// Odd-derivative multipliers (gradient, curl, divergence, projection) are
// zeroed at the Nyquist plane s = n/2 so real fields stay real; k^2 keeps it.

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

namespace kgm {

using Complex = std::complex<double>;
using CField = std::vector<Complex>;
using RField = std::vector<double>;

struct Vec3Field {
    std::array<RField, 3> c;
    RField& operator[](int a) { return c[a]; }
    const RField& operator[](int a) const { return c[a]; }
};

struct Grid3 {
    int n = 0;
    double L = 0.0;
    double h = 0.0;

    // n a power of two >= 8, L > 0
    static Grid3 make(int n, double L);

    std::size_t size() const { return std::size_t(n) * n * n; }
    std::size_t idx(int i, int j, int k) const {
        return (std::size_t(i) * n + j) * n + k;
    }
    double x(int i) const { return -0.5 * L + h * i; }
    // signed mode index
    int kindex(int m) const { return m <= n / 2 ? m : m - n; }
};

Vec3Field make_vec3(const Grid3& g);

// In-place complex transforms on an internal plan; forward is unnormalized,
// inverse divides by n^3.
class Fft3 {
public:
    explicit Fft3(const Grid3& g);
    ~Fft3();
    Fft3(const Fft3&) = delete;
    Fft3& operator=(const Fft3&) = delete;

    void forward(CField& f) const;
    void inverse(CField& f) const;
    const Grid3& grid() const { return g_; }

private:
    Grid3 g_;
    void* plan_fwd_ = nullptr;
    void* plan_bwd_ = nullptr;
    void* buf_ = nullptr; // fftw_complex scratch the plans are bound to
};

// derivatives; exact on band-limited input
std::array<CField, 3> gradient(const Fft3& fft, const CField& f);
CField laplacian(const Fft3& fft, const CField& f);
RField laplacian(const Fft3& fft, const RField& f);
Vec3Field curl(const Fft3& fft, const Vec3Field& v);
RField divergence(const Fft3& fft, const Vec3Field& v);
std::array<RField, 3> gradient_r(const Fft3& fft, const RField& f);

struct PoissonResult {
    RField u;               // zero-mean solution of -lap u = rho - mean
    double subtracted_mean = 0.0;
    bool neutrality_warning = false; // |mean| > 1e-8 * ||rho||
};
PoissonResult poisson_solve(const Fft3& fft, const RField& rho);

// removes the gradient part in Fourier space; idempotent
void leray_project(const Fft3& fft, Vec3Field& v);

// zero every mode with |s| > n/3 on any axis
void dealias(const Fft3& fft, CField& f);
void dealias(const Fft3& fft, RField& f);
void dealias(const Fft3& fft, Vec3Field& v);

} // namespace kgm
