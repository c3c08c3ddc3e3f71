#include "kgm/spectral.hpp"

#include "kgm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace kgm {

namespace {

constexpr double kPi = std::numbers::pi;

// Dirichlet tridiagonal in phi = r f: diagonal d_i, constant off-diagonal
// -1/h^2, unknowns at nodes 1..n-2.
struct PhiMatrix {
    std::vector<double> d;
    double off = 0.0;
};

PhiMatrix phi_matrix(const RadialOperator& op) {
    const int n = op.grid.n;
    const double h = op.grid.h;
    const double ih2 = 1.0 / (h * h);
    PhiMatrix M;
    M.off = -ih2;
    M.d.resize(n - 2);
    const double ll1 = static_cast<double>(op.ell) * (op.ell + 1);
    for (int i = 1; i <= n - 2; ++i) {
        const double r = op.grid.r(i);
        M.d[i - 1] = 2.0 * ih2 + op.vterm[i] + ll1 / (r * r);
    }
    return M;
}

// number of eigenvalues strictly below sigma (Sturm sequence / LDL^T pivots)
int sturm_count(const PhiMatrix& M, double sigma) {
    const double e2 = M.off * M.off;
    int count = 0;
    double t = 1.0;
    for (std::size_t i = 0; i < M.d.size(); ++i) {
        t = (i == 0) ? M.d[0] - sigma : M.d[i] - sigma - e2 / t;
        if (t == 0.0) t = -1e-300;
        if (t < 0.0) ++count;
    }
    return count;
}

// solve (T - sigma) x = b in place; tiny pivots are nudged so the solve
// survives shifts that sit on an eigenvalue (standard inverse-iteration trick)
void shifted_solve(const PhiMatrix& M, double sigma, std::vector<double>& x) {
    const std::size_t N = M.d.size();
    static thread_local std::vector<double> c;
    c.assign(N, 0.0);
    double piv = M.d[0] - sigma;
    const double floor_piv = 1e-12 * (std::abs(M.off) + std::abs(sigma) + 1.0) * 1e-4;
    if (std::abs(piv) < floor_piv) piv = (piv < 0 ? -floor_piv : floor_piv);
    c[0] = M.off / piv;
    x[0] /= piv;
    for (std::size_t i = 1; i < N; ++i) {
        piv = M.d[i] - sigma - M.off * c[i - 1];
        if (std::abs(piv) < floor_piv) piv = (piv < 0 ? -floor_piv : floor_piv);
        c[i] = M.off / piv;
        x[i] = (x[i] - M.off * x[i - 1]) / piv;
    }
    for (std::size_t i = N - 1; i-- > 0;) x[i] -= c[i] * x[i + 1];
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void matvec(const PhiMatrix& M, const std::vector<double>& x, std::vector<double>& y) {
    const std::size_t N = M.d.size();
    for (std::size_t i = 0; i < N; ++i) {
        double v = M.d[i] * x[i];
        if (i > 0) v += M.off * x[i - 1];
        if (i + 1 < N) v += M.off * x[i + 1];
        y[i] = v;
    }
}

} // namespace

RadialOperator build_operator(const PotentialSpec& pot, const RadialProfile& prof,
                              OperatorKind kind, int ell) {
    if (prof.e != 0.0) throw UsageError("operator", "linearization operators require an uncharged profile");
    if (ell < 0) throw UsageError("ell", "angular momentum must be nonnegative");
    if (prof.grid.n < 8) throw UsageError("grid", "grid too small");
    RadialOperator op;
    op.grid = prof.grid;
    op.kind = kind;
    op.ell = ell;
    op.kap2 = pot.m * pot.m - prof.omega * prof.omega;
    op.vterm.resize(prof.grid.n);
    for (int i = 0; i < prof.grid.n; ++i) {
        const double f = prof.f[i];
        const double w = (kind == OperatorKind::Lminus) ? pot.beta(f) : pot.nonlin_deriv(f);
        op.vterm[i] = op.kap2 - w;
    }
    return op;
}

std::vector<double> apply_operator(const RadialOperator& op, const std::vector<double>& v) {
    const int n = op.grid.n;
    if (static_cast<int>(v.size()) != n) throw UsageError("apply", "vector length does not match grid");
    const double h = op.grid.h;
    const double ih2 = 1.0 / (h * h);
    const double ll1 = static_cast<double>(op.ell) * (op.ell + 1);
    std::vector<double> out(n);
    if (op.ell == 0) {
        out[0] = -6.0 * (v[1] - v[0]) * ih2 + op.vterm[0] * v[0];
    } else {
        out[0] = 0.0; // regular sector functions vanish at the origin
    }
    for (int i = 1; i < n - 1; ++i) {
        const double r = op.grid.r(i);
        const double lap = (v[i + 1] - 2.0 * v[i] + v[i - 1]) * ih2
                         + (v[i + 1] - v[i - 1]) / (r * h);
        out[i] = -lap + (op.vterm[i] + ll1 / (r * r)) * v[i];
    }
    {
        const int i = n - 1;
        const double r = op.grid.r(i);
        const double lap = (-2.0 * v[i] + v[i - 1]) * ih2 + (-v[i - 1]) / (r * h);
        out[i] = -lap + (op.vterm[i] + ll1 / (r * r)) * v[i];
    }
    return out;
}

std::vector<EigenPair> lowest_eigenvalues(const RadialOperator& op, int k) {
    if (k < 1 || k > 8) throw UsageError("k", "eigenvalue count must be in [1,8]");
    const PhiMatrix M = phi_matrix(op);
    const std::size_t N = M.d.size();
    const double ih2 = -M.off;
    double lo = M.d[0], hi = M.d[0];
    for (double di : M.d) { lo = std::min(lo, di); hi = std::max(hi, di); }
    lo -= 2.0 * ih2;
    hi += 2.0 * ih2;
    const double scale = std::max({std::abs(lo), std::abs(hi), 1.0});

    std::vector<EigenPair> out;
    std::vector<std::vector<double>> found_vecs;
    std::vector<double> found_vals;

    for (int j = 1; j <= k; ++j) {
        // isolate the j-th eigenvalue by bisection on the Sturm count
        double a = lo, b = hi;
        for (int it = 0; it < 200 && (b - a) > 1e-14 * scale; ++it) {
            const double m = 0.5 * (a + b);
            if (sturm_count(M, m) >= j) b = m; else a = m;
        }
        const double lam = 0.5 * (a + b);

        // inverse iteration at the bisected shift, deflating against any
        // previously found vector closer than the bisection resolution
        std::vector<double> x(N), y(N);
        for (std::size_t i = 0; i < N; ++i)
            x[i] = std::sin(0.7 * static_cast<double>(i + 1) + 0.3) + 0.01;
        double rho = lam;
        double resid = 1e300;
        bool ok = false;
        for (int it = 0; it < 60; ++it) {
            for (std::size_t p = 0; p < found_vecs.size(); ++p) {
                if (std::abs(found_vals[p] - lam) < 1e-9 * scale) {
                    const double pr = dot(x, found_vecs[p]);
                    for (std::size_t i = 0; i < N; ++i) x[i] -= pr * found_vecs[p][i];
                }
            }
            shifted_solve(M, lam, x);
            const double nx = std::sqrt(dot(x, x));
            if (!(nx > 0.0) || !std::isfinite(nx)) throw no_convergence("inverse iteration collapsed");
            for (double& xi : x) xi /= nx;
            matvec(M, x, y);
            const double rho_new = dot(x, y);
            double rs = 0.0;
            for (std::size_t i = 0; i < N; ++i) {
                const double ri = y[i] - rho_new * x[i];
                rs += ri * ri;
            }
            resid = std::sqrt(rs);
            const bool rayleigh_settled = std::abs(rho_new - rho) <= 1e-10 * std::max(1.0, std::abs(rho_new));
            rho = rho_new;
            if (rayleigh_settled && resid <= 1e-8 * std::max(1.0, std::abs(rho))) { ok = true; break; }
        }
        if (!ok) throw no_convergence("eigenvalue iteration did not reach tolerance");

        // fix a deterministic sign: largest-magnitude component positive
        std::size_t imax = 0;
        for (std::size_t i = 1; i < N; ++i)
            if (std::abs(x[i]) > std::abs(x[imax])) imax = i;
        if (x[imax] < 0.0) for (double& xi : x) xi = -xi;

        EigenPair ep;
        ep.value = rho;
        ep.residual = resid;
        ep.vec_f.assign(op.grid.n, 0.0);
        for (std::size_t i = 0; i < N; ++i) ep.vec_f[i + 1] = x[i] / op.grid.r(static_cast<int>(i + 1));
        if (op.ell == 0) ep.vec_f[0] = (4.0 * ep.vec_f[1] - ep.vec_f[2]) / 3.0;
        out.push_back(std::move(ep));
        found_vecs.push_back(std::move(x));
        found_vals.push_back(rho);
    }
    std::sort(out.begin(), out.end(),
              [](const EigenPair& a, const EigenPair& b) { return a.value < b.value; });
    return out;
}

std::vector<StabilityPoint> stability_curve(const PotentialSpec& pot,
                                            const std::vector<double>& omegas,
                                            const RadialGrid& grid,
                                            double fd_step) {
    if (!(fd_step > 0.0)) throw UsageError("fd_step", "frequency step must be positive");
    std::vector<StabilityPoint> out;
    out.reserve(omegas.size());
    for (double w : omegas) {
        RadialProfile prof = solve_profile_e0(pot, w, grid);
        const std::vector<double> g = solve_domega(prof);
        StabilityPoint pt;
        pt.omega = w;
        pt.q = w * radial_l2sq(prof);
        pt.dq_linear = dq_domega_via_g(prof, g);
        const RadialProfile pp = solve_profile_e0(pot, w + fd_step, grid);
        const RadialProfile pm = solve_profile_e0(pot, w - fd_step, grid);
        const double qp = (w + fd_step) * radial_l2sq(pp);
        const double qm = (w - fd_step) * radial_l2sq(pm);
        pt.dq_fd = (qp - qm) / (2.0 * fd_step);
        pt.stable = pt.dq_linear < 0.0;
        out.push_back(pt);
    }
    return out;
}

double soliton_mass(const RadialProfile& prof) {
    const int n = prof.grid.n;
    const double h = prof.grid.h;
    std::vector<double> fp2(n);
    for (int i = 1; i < n - 1; ++i) {
        const double d = (prof.f[i + 1] - prof.f[i - 1]) / (2.0 * h);
        fp2[i] = d * d;
    }
    fp2[0] = 0.0; // even profile: f'(0) = 0
    {
        const double d = (prof.f[n - 1] - prof.f[n - 2]) / h;
        fp2[n - 1] = d * d;
    }
    std::vector<double> f2(n);
    for (int i = 0; i < n; ++i) f2[i] = prof.f[i] * prof.f[i];
    const double grad_sq = 4.0 * kPi * quad_r2(prof.grid, fp2);
    const double norm_sq = 4.0 * kPi * quad_r2(prof.grid, f2);
    return grad_sq / 3.0 + prof.omega * prof.omega * norm_sq;
}

double soliton_charge(const RadialProfile& prof) {
    if (prof.e == 0.0) return prof.omega * radial_l2sq(prof);
    const int n = prof.grid.n;
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i)
        w[i] = (prof.omega - prof.e * prof.alpha[i]) * prof.f[i] * prof.f[i];
    return 4.0 * kPi * quad_r2(prof.grid, w);
}

namespace {

// reduced energy h - omega q evaluated on a fresh uncharged profile
double reduced_energy(const PotentialSpec& pot, double omega, const RadialGrid& grid) {
    const RadialProfile prof = solve_profile_e0(pot, omega, grid);
    const int n = grid.n;
    const double h = grid.h;
    std::vector<double> dens(n);
    for (int i = 0; i < n; ++i) {
        double dp;
        if (i == 0) dp = 0.0;
        else if (i == n - 1) dp = (prof.f[i] - prof.f[i - 1]) / h;
        else dp = (prof.f[i + 1] - prof.f[i - 1]) / (2.0 * h);
        const double f = prof.f[i];
        // 1/2 f'^2 - 1/2 omega^2 f^2 + (1/2 m^2 f^2 - U(f))
        dens[i] = 0.5 * dp * dp - 0.5 * omega * omega * f * f + pot.V(f);
    }
    return 4.0 * kPi * quad_r2(grid, dens);
}

} // namespace

DhCheck dh_domega_check(const PotentialSpec& pot, double omega, double h_step,
                        const RadialGrid& grid) {
    if (!(h_step > 0.0) || h_step >= 0.5 * pot.m) throw UsageError("h_step", "bad frequency step");
    DhCheck c;
    const RadialProfile prof = solve_profile_e0(pot, omega, grid);
    c.expected = -prof.omega * radial_l2sq(prof);
    const double hp = reduced_energy(pot, omega + h_step, grid);
    const double hm = reduced_energy(pot, omega - h_step, grid);
    c.fd = (hp - hm) / (2.0 * h_step);
    c.rel_err = std::abs(c.fd - c.expected) / std::max(1e-300, std::abs(c.expected));
    const double wmax = std::abs(omega) + h_step;
    const double kap_min2 = pot.m * pot.m - wmax * wmax;
    c.tail_resolved = kap_min2 > 0.0 && std::sqrt(kap_min2) * grid.r_max >= 30.0;
    return c;
}

} // namespace kgm
