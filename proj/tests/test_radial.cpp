#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kgm/radial.hpp"
#include "kgm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

using namespace kgm;

namespace {

// Independent oracle: damped-Newton relaxation of the radial BVP on its own
// coarse grid, seeded from a crude amplitude scan rather than shooting.
// Deliberately shares no code with the library solver.
struct BvpOracle {
    int n;
    double rmax, h;
    std::vector<double> f;

    BvpOracle(const PotentialSpec& pot, double omega, int n_, double rmax_)
        : n(n_), rmax(rmax_), h(rmax_ / (n_ - 1)), f(n_, 0.0) {
        double kap2 = pot.m * pot.m - omega * omega;
        // seed: sech-like bubble with amplitude from the energy balance
        double c0 = 1.0;
        for (double c = 0.05; c < 20.0; c += 0.05)
            if (pot.U(c) > 0.5 * kap2 * c * c * 1.5) { c0 = c; break; }
        for (int i = 0; i < n; ++i) {
            double r = h * i;
            f[i] = c0 / std::cosh(std::sqrt(kap2) * r * 0.8);
        }
        // damped Newton on the FD system
        std::vector<double> lo(n), di(n), up(n), R(n);
        for (int it = 0; it < 400; ++it) {
            double worst = residual(pot, kap2, R);
            if (worst < 1e-12) break;
            lo[0] = 0; di[0] = 6.0 / (h * h) + kap2 - pot.nonlin_deriv(f[0]); up[0] = -6.0 / (h * h);
            for (int i = 1; i + 1 < n; ++i) {
                double r = h * i;
                lo[i] = -1.0 / (h * h) + 1.0 / (r * h);
                di[i] = 2.0 / (h * h) + kap2 - pot.nonlin_deriv(f[i]);
                up[i] = -1.0 / (h * h) - 1.0 / (r * h);
            }
            lo[n - 1] = 0; di[n - 1] = 1; up[n - 1] = 0; R[n - 1] = f[n - 1];
            // Thomas
            for (int i = 1; i < n; ++i) {
                double w = lo[i] / di[i - 1];
                di[i] -= w * up[i - 1];
                R[i] -= w * R[i - 1];
            }
            R[n - 1] /= di[n - 1];
            for (int i = n - 2; i >= 0; --i) R[i] = (R[i] - up[i] * R[i + 1]) / di[i];
            double lam = 1.0;
            if (it < 6) lam = 0.5; // keep the seed from overshooting early
            for (int i = 0; i < n; ++i) f[i] -= lam * R[i];
            for (int i = 0; i < n; ++i) f[i] = std::max(f[i], 0.0);
        }
    }

    double residual(const PotentialSpec& pot, double kap2, std::vector<double>& R) const {
        R.assign(n, 0.0);
        R[0] = -6.0 * (f[1] - f[0]) / (h * h) + kap2 * f[0] - pot.nonlin(f[0]);
        double worst = std::fabs(R[0]);
        for (int i = 1; i + 1 < n; ++i) {
            double r = h * i;
            R[i] = -(f[i + 1] - 2.0 * f[i] + f[i - 1]) / (h * h)
                   - (f[i + 1] - f[i - 1]) / (r * h)
                   + kap2 * f[i] - pot.nonlin(f[i]);
            worst = std::max(worst, std::fabs(R[i]));
        }
        return worst;
    }
};

RadialGrid workhorse_grid(double omega, double m = 1.0) {
    double kap = std::sqrt(m * m - omega * omega);
    return RadialGrid::make(1 << 16, 80.0 / kap);
}

} // namespace

TEST_CASE("uncharged workhorse profile: residual, positivity, monotonicity, tail") {
    auto pot = PotentialSpec::pure_power(1.0, 4.0, 1.0);
    auto grid = workhorse_grid(0.8);
    auto prof = solve_profile_e0(pot, 0.8, grid);

    CHECK(prof.residual_norm < 1e-8);
    CHECK(prof.f0 > 0.0);
    bool positive = true, monotone = true;
    for (int i = 0; i < grid.n; ++i) positive &= prof.f[i] > 0.0;
    for (int i = 1; i < grid.n; ++i) monotone &= prof.f[i] <= prof.f[i - 1] * (1.0 + 1e-12);
    CHECK(positive);
    CHECK(monotone);

    // symmetric center: second-order one-sided derivative
    double d0 = (-3.0 * prof.f[0] + 4.0 * prof.f[1] - prof.f[2]) / (2.0 * grid.h);
    CHECK(std::fabs(d0) < 1e-6 * prof.f0);

    auto fit = decay_rate(prof);
    CHECK(fit.rate == doctest::Approx(0.6).epsilon(0.02));
    CHECK(fit.reference_rate == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("profile matches the independent relaxation oracle") {
    auto pot = PotentialSpec::cubic_quintic(1.0, 1.0, 0.05);
    double omega = 0.5;
    auto grid = workhorse_grid(omega);
    auto prof = solve_profile_coupled(pot, omega, 0.0, grid);

    BvpOracle oracle(pot, omega, 3001, 30.0);
    // compare center amplitudes; oracle grid error is O(h^2) ~ 1e-4, so ask 1e-3
    CHECK(prof.f0 == doctest::Approx(oracle.f[0]).epsilon(1e-3));

    // and against the fine-grid library value the oracle agrees after Richardson:
    BvpOracle o2(pot, omega, 6001, 30.0);
    double rich = (4.0 * o2.f[0] - oracle.f[0]) / 3.0;
    CHECK(prof.f0 == doctest::Approx(rich).epsilon(1e-6));
}

TEST_CASE("center amplitude converges at second order in h") {
    auto pot = PotentialSpec::pure_power(1.0, 4.0, 1.0);
    double omega = 0.8;
    double rmax = 80.0 / 0.6;
    auto p1 = solve_profile_e0(pot, omega, RadialGrid::make(1 << 14, rmax));
    auto p2 = solve_profile_e0(pot, omega, RadialGrid::make(1 << 15, rmax));
    auto p3 = solve_profile_e0(pot, omega, RadialGrid::make(1 << 16, rmax));
    double d12 = std::fabs(p1.f0 - p3.f0);
    double d23 = std::fabs(p2.f0 - p3.f0);
    // halving h divides the offset from the fine answer by about 4
    CHECK(d12 / d23 == doctest::Approx(4.0).epsilon(0.35));
}

TEST_CASE("no ground state outside the admissible window") {
    auto pot = PotentialSpec::cubic_quintic(1.0, 0.1, 50.0); // provably shallow well
    CHECK_THROWS_AS(solve_profile_e0(pot, 0.3, RadialGrid::make(4096, 40.0)), PhysicsError);
}

TEST_CASE("charged profile: coupling, screening bounds, charge scaling") {
    auto pot = PotentialSpec::cubic_quintic(1.0, 1.0, 0.05);
    double omega = 0.5;
    auto grid = workhorse_grid(omega);
    auto p0 = solve_profile_e0(pot, omega, grid);
    auto pa = solve_profile_coupled(pot, omega, 0.05, grid);
    auto pb = solve_profile_coupled(pot, omega, 0.025, grid);

    CHECK(pa.residual_norm < 1e-8);
    CHECK(pa.alpha_residual < 1e-8);
    CHECK(pa.iterations <= 100);

    // alpha pinned between 0 and omega/e for omega e > 0
    double amax = *std::max_element(pa.alpha.begin(), pa.alpha.end());
    double amin = *std::min_element(pa.alpha.begin(), pa.alpha.end());
    CHECK(amin >= -1e-12);
    CHECK(amax <= omega / 0.05 + 1e-12);

    // departure from the uncharged shape scales as e^2
    std::vector<double> da(grid.n), db(grid.n);
    for (int i = 0; i < grid.n; ++i) {
        da[i] = pa.f[i] - p0.f[i];
        db[i] = pb.f[i] - p0.f[i];
    }
    double na = radial_h2_norm(grid, da), nb = radial_h2_norm(grid, db);
    CHECK(na / nb == doctest::Approx(4.0).epsilon(0.2));

    // decay rate drifts by less than 5 percent at e = 0.05
    auto f0fit = decay_rate(p0);
    auto fafit = decay_rate(pa);
    CHECK(std::fabs(fafit.rate - f0fit.rate) < 0.05 * f0fit.rate);
}

TEST_CASE("e = 0 entry points agree bit for bit") {
    auto pot = PotentialSpec::pure_power(1.0, 4.0, 1.0);
    auto grid = RadialGrid::make(8192, 80.0 / 0.6);
    auto a = solve_profile_e0(pot, 0.8, grid);
    auto b = solve_profile_coupled(pot, 0.8, 0.0, grid);
    bool same = a.f0 == b.f0;
    for (int i = 0; i < grid.n; ++i) same &= a.f[i] == b.f[i];
    CHECK(same);
}

TEST_CASE("joint residual decreases after the opening fixed-point rounds") {
    auto pot = PotentialSpec::cubic_quintic(1.0, 1.0, 0.05);
    auto grid = RadialGrid::make(1 << 14, 80.0 / std::sqrt(0.75));
    auto prof = solve_profile_coupled(pot, 0.5, 0.08, grid);
    const auto& hist = prof.fixed_point_residuals;
    REQUIRE(hist.size() >= 2);
    for (size_t k = 3; k < hist.size(); ++k)
        CHECK(hist[k] <= hist[k - 1] * (1.0 + 1e-9));
}

TEST_CASE("frequency derivative against recomputed profiles") {
    auto pot = PotentialSpec::pure_power(1.0, 4.0, 1.0);
    double omega = 0.8, dw = 1e-3;
    auto grid = workhorse_grid(omega);
    auto prof = solve_profile_e0(pot, omega, grid);
    auto g = solve_domega(prof);

    auto pp = solve_profile_e0(pot, omega + dw, grid);
    auto pm = solve_profile_e0(pot, omega - dw, grid);

    // compare where the profile is well above the tail floor
    double worst = 0.0;
    for (int i = 0; i < grid.n; ++i) {
        if (prof.f[i] < 1e-4 * prof.f0) break;
        double fd = (pp.f[i] - pm.f[i]) / (2.0 * dw);
        worst = std::max(worst, std::fabs(fd - g[i]));
    }
    double gennorm = 0.0;
    for (int i = 0; i < grid.n; ++i) gennorm = std::max(gennorm, std::fabs(g[i]));
    CHECK(worst / gennorm < 1e-4);

    // d/domega (omega ||f||^2): assembled vs centered difference
    double lhs = dq_domega_via_g(prof, g);
    double qp = (omega + dw) * radial_l2sq(pp);
    double qm = (omega - dw) * radial_l2sq(pm);
    CHECK(lhs == doctest::Approx((qp - qm) / (2.0 * dw)).epsilon(1e-4));
}

TEST_CASE("decay fit on synthetic data and underflow guard") {
    auto pot = PotentialSpec::pure_power(1.0, 4.0, 1.0);
    RadialProfile prof;
    prof.pot = pot;
    prof.grid = RadialGrid::make(4096, 60.0);
    prof.omega = 0.8;
    prof.e = 0.0;
    prof.f.resize(prof.grid.n);
    prof.alpha.assign(prof.grid.n, 0.0);
    for (int i = 0; i < prof.grid.n; ++i) prof.f[i] = std::exp(-1.3 * prof.grid.r(i));
    prof.f0 = 1.0;
    auto fit = decay_rate(prof);
    CHECK(fit.rate == doctest::Approx(1.3).epsilon(1e-6));
    CHECK(fit.fit_residual < 1e-9);

    for (int i = 0; i < prof.grid.n; ++i) prof.f[i] = std::exp(-12.0 * prof.grid.r(i));
    CHECK_THROWS_AS(decay_rate(prof), PhysicsError);
}
