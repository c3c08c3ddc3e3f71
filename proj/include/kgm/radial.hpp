#pragma once
// Radial ground-state machinery on a uniform grid r_i = i h.
//
// The standing-wave amplitude f(r) solves
//     -f'' - (2/r) f' + (m^2 - (omega - e alpha)^2) f = U'(f),   f'(0) = 0,
// and at e > 0 couples to the electrostatic potential
//     -alpha'' - (2/r) alpha' + e^2 f^2 alpha = omega e f^2.
//
// Strategy: classify shooting trajectories (overshoot past zero vs turning
// back up) with an adaptive embedded RK pair, bisect the initial amplitude,
// then polish on the grid with Newton so the *discrete* second-order residual
// sits near machine level.  The exponential tail below 1e-8 f(0) is replaced
// by the exact modified-Helmholtz far field C exp(-kappa r)/r, which the
// polish keeps consistent with the interior.
//
// All integrals over radial functions use the trapezoid rule with weight
// r^2 dr; for fields decaying at both ends of the window this is
// spectrally accurate (every odd derivative vanishes at the endpoints).

#include "kgm/potential.hpp"

#include <vector>

namespace kgm {

struct RadialGrid {
    int n = 0;
    double r_max = 0.0;
    double h = 0.0;
    static RadialGrid make(int n, double r_max);
    double r(int i) const { return h * i; }
};

struct RadialProfile {
    PotentialSpec pot;
    RadialGrid grid;
    double omega = 0.0;
    double e = 0.0;
    std::vector<double> f;
    std::vector<double> alpha;        // identically zero when e = 0
    double f0 = 0.0;                  // center amplitude
    double residual_norm = 0.0;       // max FD residual of the f equation, / f(0)
    double alpha_residual = 0.0;      // max FD residual of the alpha equation
    int iterations = 0;               // outer fixed-point rounds (0 for e = 0)
    std::vector<double> fixed_point_residuals; // joint residual after each round

    double kappa() const;             // asymptotic decay rate sqrt(m^2-(omega-e alpha_end)^2)
    double alpha_end() const { return alpha.empty() ? 0.0 : alpha.back(); }
};

// Uncharged ground state.  Throws NoGroundState when no overshoot/turn bracket
// exists below the amplitude cap, UsageError on an inadmissible grid.
RadialProfile solve_profile_e0(const PotentialSpec& pot, double omega, const RadialGrid& grid);

// Charged ground state by alternating alpha solve / f shoot.  e = 0 falls
// through to solve_profile_e0 so both entry points agree bit for bit.
RadialProfile solve_profile_coupled(const PotentialSpec& pot, double omega, double e,
                                    const RadialGrid& grid);

// Frequency derivative g = df/domega on the same grid via the linearized
// operator: (-lap + m^2 - omega^2 - U''(f)) g = 2 omega f.  e = 0 profiles only.
std::vector<double> solve_domega(const RadialProfile& prof);

// d/domega of omega ||f||^2 assembled from g (no extra profile solves)
double dq_domega_via_g(const RadialProfile& prof, const std::vector<double>& g);

struct DecayFit {
    double rate = 0.0;           // -slope of log f over the window
    double fit_residual = 0.0;   // rms of the linear fit
    double reference_rate = 0.0; // sqrt(m^2 - (omega - e alpha_end)^2)
    double window_lo = 0.0, window_hi = 0.0;
};

// Least-squares log-slope of the tail over [lo_frac, hi_frac] * r_max.
// Throws TailUnderflow when the window dips below 1e-280.
DecayFit decay_rate(const RadialProfile& prof, double lo_frac = 0.6, double hi_frac = 0.9);

// trapezoid of F(r) r^2 dr over the grid
double quad_r2(const RadialGrid& grid, const std::vector<double>& F);

// sqrt( integral (F^2 + F'^2 + F''^2) r^2 dr ), centered differences inside
double radial_h2_norm(const RadialGrid& grid, const std::vector<double>& F);

// ||f||_{L^2}^2 = 4 pi integral f^2 r^2 dr
double radial_l2sq(const RadialProfile& prof);

} // namespace kgm
