#pragma once
// Pointwise lattice kernels and reductions, each with an OpenMP and a plain
// serial implementation selected by a process-wide policy.  Reductions
// accumulate per-slab partials (one slab = one leading-axis plane) and
// combine them in slab order in both implementations, so results are
// bitwise identical across policies and across repeated runs.

#include "kgm/grid3.hpp"
#include "kgm/potential.hpp"

#include <complex>

namespace kgm::kernels {

enum class Exec { Serial, Parallel };
Exec policy();
void set_policy(Exec p);

// y += a x
void axpy(RField& y, double a, const RField& x);
void axpy(CField& y, double a, const CField& x);

// out = psi + i e s phi  (s a real lattice field)
void phase_push(CField& out, const CField& psi, double e, const RField& s,
                const CField& phi);

// out += i e s f
void add_i_scaled(CField& out, double e, const RField& s, const CField& f);

// out = beta(|phi|) phi
void beta_mul(CField& out, const PotentialSpec& pot, const CField& phi);

// out = (A . grad) phi given the three gradient components
void a_dot_grad(CField& out, const Vec3Field& A, const std::array<CField, 3>& grad);

// out = |A|^2 phi
void abs2_mul(CField& out, const Vec3Field& A, const CField& phi);

// rho_i = Im(conj(phi_i) psi_i), the matter charge density <i phi, psi>
void charge_density(RField& rho, const CField& phi, const CField& psi);

// J_a = Im(conj(phi) d_a phi) - e A_a |phi|^2, the gauge current
void current_density(Vec3Field& J, const CField& phi,
                     const std::array<CField, 3>& grad, const Vec3Field& A,
                     double e);

// slab-deterministic reductions (plain sums, no h^3 weight)
double potential_sum(const Grid3& g, const PotentialSpec& pot, const CField& phi);
double sum(const Grid3& g, const RField& f);
double dot(const Grid3& g, const RField& a, const RField& b);
double l2sq(const Grid3& g, const RField& f);
double l2sq(const Grid3& g, const CField& f);
std::complex<double> cdot(const Grid3& g, const CField& a, const CField& b);

} // namespace kgm::kernels
