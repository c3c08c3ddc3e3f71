#include "kgm/grid3.hpp"
#include "kgm/errors.hpp"
#include "kgm/kernels.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <numbers>

namespace kgm {

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// signed wavenumber line for one axis; odd = true zeroes the Nyquist plane
std::vector<double> kline(const Grid3& g, bool odd) {
    std::vector<double> k(g.n);
    const double base = 2.0 * std::numbers::pi / g.L;
    for (int m = 0; m < g.n; ++m) {
        int s = g.kindex(m);
        if (odd && s == g.n / 2) s = 0;
        k[m] = base * s;
    }
    return k;
}

} // namespace

Grid3 Grid3::make(int n, double L) {
    if (!power_of_two(n) || n < 8)
        throw UsageError("lattice size must be a power of two, at least 8");
    if (!(L > 0.0)) throw UsageError("box length must be positive");
    Grid3 g;
    g.n = n;
    g.L = L;
    g.h = L / n;
    return g;
}

Vec3Field make_vec3(const Grid3& g) {
    Vec3Field v;
    for (int a = 0; a < 3; ++a) v[a].assign(g.size(), 0.0);
    return v;
}

Fft3::Fft3(const Grid3& g) : g_(g) {
    auto* buf = fftw_alloc_complex(g.size());
    if (!buf) throw UsageError("fft buffer allocation failed");
    buf_ = buf;
    plan_fwd_ = fftw_plan_dft_3d(g.n, g.n, g.n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    plan_bwd_ = fftw_plan_dft_3d(g.n, g.n, g.n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!plan_fwd_ || !plan_bwd_) throw UsageError("fft planning failed");
}

Fft3::~Fft3() {
    if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    if (plan_bwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
    if (buf_) fftw_free(static_cast<fftw_complex*>(buf_));
}

void Fft3::forward(CField& f) const {
    if (f.size() != g_.size()) throw UsageError("field size does not match the grid");
    auto* buf = static_cast<fftw_complex*>(buf_);
    std::memcpy(buf, static_cast<const void*>(f.data()), sizeof(fftw_complex) * g_.size());
    fftw_execute(static_cast<fftw_plan>(plan_fwd_));
    std::memcpy(static_cast<void*>(f.data()), buf, sizeof(fftw_complex) * g_.size());
}

void Fft3::inverse(CField& f) const {
    if (f.size() != g_.size()) throw UsageError("field size does not match the grid");
    auto* buf = static_cast<fftw_complex*>(buf_);
    std::memcpy(buf, static_cast<const void*>(f.data()), sizeof(fftw_complex) * g_.size());
    fftw_execute(static_cast<fftw_plan>(plan_bwd_));
    const double inv = 1.0 / double(g_.size());
    auto* out = f.data();
    std::memcpy(static_cast<void*>(out), buf, sizeof(fftw_complex) * g_.size());
    for (std::size_t i = 0; i < g_.size(); ++i) out[i] *= inv;
}

std::array<CField, 3> gradient(const Fft3& fft, const CField& f) {
    const Grid3& g = fft.grid();
    auto k = kline(g, true);
    CField fh = f;
    fft.forward(fh);
    std::array<CField, 3> out;
    for (int a = 0; a < 3; ++a) out[a].resize(g.size());
    const Complex I(0.0, 1.0);
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            for (int kk = 0; kk < g.n; ++kk) {
                const std::size_t p = g.idx(i, j, kk);
                out[0][p] = I * k[i] * fh[p];
                out[1][p] = I * k[j] * fh[p];
                out[2][p] = I * k[kk] * fh[p];
            }
    for (int a = 0; a < 3; ++a) fft.inverse(out[a]);
    return out;
}

CField laplacian(const Fft3& fft, const CField& f) {
    const Grid3& g = fft.grid();
    auto k = kline(g, false);
    CField fh = f;
    fft.forward(fh);
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            for (int kk = 0; kk < g.n; ++kk) {
                const double k2 = k[i] * k[i] + k[j] * k[j] + k[kk] * k[kk];
                fh[g.idx(i, j, kk)] *= -k2;
            }
    fft.inverse(fh);
    return fh;
}

namespace {

CField embed(const RField& f) {
    CField c(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) c[i] = Complex(f[i], 0.0);
    return c;
}

RField real_part(const CField& c) {
    RField f(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) f[i] = c[i].real();
    return f;
}

} // namespace

RField laplacian(const Fft3& fft, const RField& f) {
    return real_part(laplacian(fft, embed(f)));
}

std::array<RField, 3> gradient_r(const Fft3& fft, const RField& f) {
    auto gc = gradient(fft, embed(f));
    return {real_part(gc[0]), real_part(gc[1]), real_part(gc[2])};
}

Vec3Field curl(const Fft3& fft, const Vec3Field& v) {
    const Grid3& g = fft.grid();
    auto k = kline(g, true);
    std::array<CField, 3> vh;
    for (int a = 0; a < 3; ++a) {
        vh[a] = embed(v[a]);
        fft.forward(vh[a]);
    }
    std::array<CField, 3> ch;
    for (int a = 0; a < 3; ++a) ch[a].resize(g.size());
    const Complex I(0.0, 1.0);
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            for (int kk = 0; kk < g.n; ++kk) {
                const std::size_t p = g.idx(i, j, kk);
                const double k1 = k[i], k2 = k[j], k3 = k[kk];
                ch[0][p] = I * (k2 * vh[2][p] - k3 * vh[1][p]);
                ch[1][p] = I * (k3 * vh[0][p] - k1 * vh[2][p]);
                ch[2][p] = I * (k1 * vh[1][p] - k2 * vh[0][p]);
            }
    Vec3Field out;
    for (int a = 0; a < 3; ++a) {
        fft.inverse(ch[a]);
        out[a] = real_part(ch[a]);
    }
    return out;
}

RField divergence(const Fft3& fft, const Vec3Field& v) {
    const Grid3& g = fft.grid();
    auto k = kline(g, true);
    CField acc(g.size(), Complex(0.0, 0.0));
    const Complex I(0.0, 1.0);
    for (int a = 0; a < 3; ++a) {
        CField vh = embed(v[a]);
        fft.forward(vh);
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j)
                for (int kk = 0; kk < g.n; ++kk) {
                    const std::size_t p = g.idx(i, j, kk);
                    const double ka = (a == 0 ? k[i] : a == 1 ? k[j] : k[kk]);
                    acc[p] += I * ka * vh[p];
                }
    }
    fft.inverse(acc);
    return real_part(acc);
}

PoissonResult poisson_solve(const Fft3& fft, const RField& rho) {
    const Grid3& g = fft.grid();
    auto k = kline(g, false);
    PoissonResult res;
    const double vol_norm = kernels::l2sq(g, rho) * g.h * g.h * g.h;
    CField rh = embed(rho);
    fft.forward(rh);
    res.subtracted_mean = rh[0].real() / double(g.size());
    res.neutrality_warning = std::fabs(res.subtracted_mean) > 1e-8 * std::sqrt(vol_norm);
    rh[0] = Complex(0.0, 0.0);
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            for (int kk = 0; kk < g.n; ++kk) {
                const double k2 = k[i] * k[i] + k[j] * k[j] + k[kk] * k[kk];
                if (k2 > 0.0) rh[g.idx(i, j, kk)] /= k2;
            }
    fft.inverse(rh);
    res.u = real_part(rh);
    return res;
}

void leray_project(const Fft3& fft, Vec3Field& v) {
    const Grid3& g = fft.grid();
    auto k = kline(g, true);
    std::array<CField, 3> vh;
    for (int a = 0; a < 3; ++a) {
        vh[a] = embed(v[a]);
        fft.forward(vh[a]);
    }
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            for (int kk = 0; kk < g.n; ++kk) {
                const double k1 = k[i], k2 = k[j], k3 = k[kk];
                const double ksq = k1 * k1 + k2 * k2 + k3 * k3;
                if (ksq == 0.0) continue;
                const std::size_t p = g.idx(i, j, kk);
                const Complex kdotv = k1 * vh[0][p] + k2 * vh[1][p] + k3 * vh[2][p];
                vh[0][p] -= k1 * kdotv / ksq;
                vh[1][p] -= k2 * kdotv / ksq;
                vh[2][p] -= k3 * kdotv / ksq;
            }
    for (int a = 0; a < 3; ++a) {
        fft.inverse(vh[a]);
        v[a] = real_part(vh[a]);
    }
}

void dealias(const Fft3& fft, CField& f) {
    const Grid3& g = fft.grid();
    const int cut = g.n / 3;
    fft.forward(f);
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            for (int kk = 0; kk < g.n; ++kk) {
                if (std::abs(g.kindex(i)) > cut || std::abs(g.kindex(j)) > cut ||
                    std::abs(g.kindex(kk)) > cut)
                    f[g.idx(i, j, kk)] = Complex(0.0, 0.0);
            }
    fft.inverse(f);
}

void dealias(const Fft3& fft, RField& f) {
    CField c = embed(f);
    dealias(fft, c);
    f = real_part(c);
}

void dealias(const Fft3& fft, Vec3Field& v) {
    for (int a = 0; a < 3; ++a) dealias(fft, v[a]);
}

} // namespace kgm
