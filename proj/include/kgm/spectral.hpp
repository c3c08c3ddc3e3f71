#pragma once
// Linearization diagnostics around the uncharged ground state.
//
// Radial fluctuation operators at angular momentum ell:
//     L_minus = -lap_ell + m^2 - omega^2 - beta(f)        (phase block)
//     L_plus  = -lap_ell + m^2 - omega^2 - U''(f)         (amplitude block)
// with lap_ell acting on radial functions through f'' + (2/r) f' - ell(ell+1)/r^2 f.
//
// Eigenvalues come from the substitution phi = r f, which turns both
// operators into plainly symmetric Dirichlet tridiagonal matrices; the node
// counts of the Sturm sequence isolate each of the lowest eigenvalues before
// inverse iteration builds the eigenvector.  The f-space stencil (ghost node
// enforcing f'(0) = 0) is kept for residual checks against profile data; its
// rows are exactly 1/r times the phi-space rows, so the two views agree.
//
// Also here: the scalar functionals of the profile that the slow dynamics
// needs (inertia, charge, binding energy) and the frequency-slope stability
// classification d/domega (omega ||f||^2) < 0.

#include "kgm/potential.hpp"
#include "kgm/radial.hpp"

#include <vector>

namespace kgm {

enum class OperatorKind { Lplus, Lminus };

struct RadialOperator {
    RadialGrid grid;
    OperatorKind kind = OperatorKind::Lminus;
    int ell = 0;
    double kap2 = 0.0;            // m^2 - omega^2
    std::vector<double> vterm;    // potential part: kap2 - beta or kap2 - U'', per node
};

// profile must be uncharged; ell >= 0
RadialOperator build_operator(const PotentialSpec& pot, const RadialProfile& prof,
                              OperatorKind kind, int ell);

// f-space action; row 0 uses the symmetric ghost for ell = 0 and is zero for
// ell > 0 (regular functions vanish at the origin there)
std::vector<double> apply_operator(const RadialOperator& op, const std::vector<double>& v);

struct EigenPair {
    double value = 0.0;
    double residual = 0.0;          // ||A v - value v|| / ||v||, phi-space
    std::vector<double> vec_f;      // eigenvector transported back to f-space
};

// k lowest eigenvalues in ascending order, k <= 8
std::vector<EigenPair> lowest_eigenvalues(const RadialOperator& op, int k);

struct StabilityPoint {
    double omega = 0.0;
    double q = 0.0;          // omega ||f||^2
    double dq_fd = 0.0;      // centered difference across omega
    double dq_linear = 0.0;  // 2 omega <f,g> + ||f||^2 from the linearized solve
    bool stable = false;     // negative slope
};

std::vector<StabilityPoint> stability_curve(const PotentialSpec& pot,
                                            const std::vector<double>& omegas,
                                            const RadialGrid& grid,
                                            double fd_step = 1e-3);

// inertia (1/3)||grad f||^2 + omega^2 ||f||^2
double soliton_mass(const RadialProfile& prof);

// charge integral (omega - e alpha) f^2 d^3x; reduces to omega ||f||^2 at e = 0
double soliton_charge(const RadialProfile& prof);

struct DhCheck {
    double fd = 0.0;         // centered difference of the reduced energy
    double expected = 0.0;   // -omega ||f||^2
    double rel_err = 0.0;
    bool tail_resolved = true; // false when kappa r_max is too small to trust
};

// d/domega of (energy - omega charge) against -charge
DhCheck dh_domega_check(const PotentialSpec& pot, double omega, double h_step,
                        const RadialGrid& grid);

} // namespace kgm
