#include "kgm/kernels.hpp"
#include "kgm/errors.hpp"

#include <atomic>
#include <cmath>

namespace kgm::kernels {

namespace {

std::atomic<Exec> g_policy{Exec::Parallel};

void require(bool ok, const char* what) {
    if (!ok) throw UsageError(what);
}

// reduction skeleton: per-slab partials, combined in slab order; the slab
// body is identical in both branches so the result is policy-independent
template <class Term>
double slab_reduce(const Grid3& g, Term term) {
    const std::size_t plane = std::size_t(g.n) * g.n;
    std::vector<double> partial(g.n, 0.0);
    if (policy() == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (int s = 0; s < g.n; ++s) {
            double acc = 0.0;
            const std::size_t base = std::size_t(s) * plane;
            for (std::size_t i = 0; i < plane; ++i) acc += term(base + i);
            partial[std::size_t(s)] = acc;
        }
    } else {
        for (int s = 0; s < g.n; ++s) {
            double acc = 0.0;
            const std::size_t base = std::size_t(s) * plane;
            for (std::size_t i = 0; i < plane; ++i) acc += term(base + i);
            partial[std::size_t(s)] = acc;
        }
    }
    double total = 0.0;
    for (int s = 0; s < g.n; ++s) total += partial[std::size_t(s)];
    return total;
}

} // namespace

Exec policy() { return g_policy.load(std::memory_order_relaxed); }
void set_policy(Exec p) { g_policy.store(p, std::memory_order_relaxed); }

void axpy(RField& y, double a, const RField& x) {
    require(y.size() == x.size(), "axpy: size mismatch");
    const long long n = (long long)y.size();
    if (policy() == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < n; ++i) y[i] += a * x[i];
    } else {
        for (long long i = 0; i < n; ++i) y[i] += a * x[i];
    }
}

void axpy(CField& y, double a, const CField& x) {
    require(y.size() == x.size(), "axpy: size mismatch");
    const long long n = (long long)y.size();
    if (policy() == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < n; ++i) y[i] += a * x[i];
    } else {
        for (long long i = 0; i < n; ++i) y[i] += a * x[i];
    }
}

void phase_push(CField& out, const CField& psi, double e, const RField& s,
                const CField& phi) {
    require(psi.size() == s.size() && psi.size() == phi.size(), "phase_push: size mismatch");
    out.resize(psi.size());
    const long long n = (long long)psi.size();
    if (policy() == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < n; ++i)
            out[i] = psi[i] + Complex(0.0, e * s[i]) * phi[i];
    } else {
        for (long long i = 0; i < n; ++i)
            out[i] = psi[i] + Complex(0.0, e * s[i]) * phi[i];
    }
}

void add_i_scaled(CField& out, double e, const RField& s, const CField& f) {
    require(out.size() == s.size() && out.size() == f.size(), "add_i_scaled: size mismatch");
    const long long n = (long long)out.size();
    if (policy() == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < n; ++i) out[i] += Complex(0.0, e * s[i]) * f[i];
    } else {
        for (long long i = 0; i < n; ++i) out[i] += Complex(0.0, e * s[i]) * f[i];
    }
}

void beta_mul(CField& out, const PotentialSpec& pot, const CField& phi) {
    out.resize(phi.size());
    const long long n = (long long)phi.size();
    if (policy() == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < n; ++i) out[i] = pot.beta(std::abs(phi[i])) * phi[i];
    } else {
        for (long long i = 0; i < n; ++i) out[i] = pot.beta(std::abs(phi[i])) * phi[i];
    }
}

void a_dot_grad(CField& out, const Vec3Field& A, const std::array<CField, 3>& grad) {
    require(A[0].size() == grad[0].size(), "a_dot_grad: size mismatch");
    out.resize(grad[0].size());
    const long long n = (long long)out.size();
    if (policy() == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < n; ++i)
            out[i] = A[0][i] * grad[0][i] + A[1][i] * grad[1][i] + A[2][i] * grad[2][i];
    } else {
        for (long long i = 0; i < n; ++i)
            out[i] = A[0][i] * grad[0][i] + A[1][i] * grad[1][i] + A[2][i] * grad[2][i];
    }
}

void abs2_mul(CField& out, const Vec3Field& A, const CField& phi) {
    require(A[0].size() == phi.size(), "abs2_mul: size mismatch");
    out.resize(phi.size());
    const long long n = (long long)phi.size();
    if (policy() == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < n; ++i)
            out[i] = (A[0][i] * A[0][i] + A[1][i] * A[1][i] + A[2][i] * A[2][i]) * phi[i];
    } else {
        for (long long i = 0; i < n; ++i)
            out[i] = (A[0][i] * A[0][i] + A[1][i] * A[1][i] + A[2][i] * A[2][i]) * phi[i];
    }
}

void charge_density(RField& rho, const CField& phi, const CField& psi) {
    require(phi.size() == psi.size(), "charge_density: size mismatch");
    rho.resize(phi.size());
    const long long n = (long long)phi.size();
    if (policy() == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < n; ++i)
            rho[i] = std::imag(std::conj(phi[i]) * psi[i]);
    } else {
        for (long long i = 0; i < n; ++i)
            rho[i] = std::imag(std::conj(phi[i]) * psi[i]);
    }
}

void current_density(Vec3Field& J, const CField& phi,
                     const std::array<CField, 3>& grad, const Vec3Field& A,
                     double e) {
    require(phi.size() == grad[0].size() && phi.size() == A[0].size(),
            "current_density: size mismatch");
    for (int a = 0; a < 3; ++a) J[a].resize(phi.size());
    const long long n = (long long)phi.size();
    for (int a = 0; a < 3; ++a) {
        if (policy() == Exec::Parallel) {
#pragma omp parallel for schedule(static)
            for (long long i = 0; i < n; ++i) {
                const double abs2 = std::norm(phi[i]);
                J[a][i] = std::imag(std::conj(phi[i]) * grad[a][i]) - e * A[a][i] * abs2;
            }
        } else {
            for (long long i = 0; i < n; ++i) {
                const double abs2 = std::norm(phi[i]);
                J[a][i] = std::imag(std::conj(phi[i]) * grad[a][i]) - e * A[a][i] * abs2;
            }
        }
    }
}

double potential_sum(const Grid3& g, const PotentialSpec& pot, const CField& phi) {
    require(phi.size() == g.size(), "potential_sum: size mismatch");
    return slab_reduce(g, [&](std::size_t i) { return pot.V(std::abs(phi[i])); });
}

double sum(const Grid3& g, const RField& f) {
    require(f.size() == g.size(), "sum: size mismatch");
    return slab_reduce(g, [&](std::size_t i) { return f[i]; });
}

double dot(const Grid3& g, const RField& a, const RField& b) {
    require(a.size() == g.size() && b.size() == g.size(), "dot: size mismatch");
    return slab_reduce(g, [&](std::size_t i) { return a[i] * b[i]; });
}

double l2sq(const Grid3& g, const RField& f) {
    require(f.size() == g.size(), "l2sq: size mismatch");
    return slab_reduce(g, [&](std::size_t i) { return f[i] * f[i]; });
}

double l2sq(const Grid3& g, const CField& f) {
    require(f.size() == g.size(), "l2sq: size mismatch");
    return slab_reduce(g, [&](std::size_t i) { return std::norm(f[i]); });
}

std::complex<double> cdot(const Grid3& g, const CField& a, const CField& b) {
    require(a.size() == g.size() && b.size() == g.size(), "cdot: size mismatch");
    const double re = slab_reduce(g, [&](std::size_t i) {
        return a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    });
    const double im = slab_reduce(g, [&](std::size_t i) {
        return a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
    });
    return {re, im};
}

} // namespace kgm::kernels
