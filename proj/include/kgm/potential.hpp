#pragma once
// Scalar self-interaction for the charged Klein-Gordon field.
//
// The energy density carries V(phi) = m^2 |phi|^2 / 2 - U(|phi|), where U is
// the nonlinear well.  Everything downstream needs consistent derivatives of
// the same U, so this header is the single source for
//
//     U(f)             well, U(0) = U'(0) = U''(0) = 0
//     nonlin(f)  = U'(f)        full nonlinear force term
//     beta(f)    = U'(f)/f      multiplier form: nonlinearity acts as beta(|phi|) phi
//     nonlin_deriv(f) = U''(f)  enters the real-part block of linearized operators
//
// Two families are built in:
//     pure-power     U = b f^p / p,            3 < p < 6
//     cubic-quintic  U = b1 f^4/4 - b2 f^6/6,  b1, b2 > 0 (quintic defocusing)
//
// Units: hbar = c = 1, field amplitude dimensionless, m sets the length scale.

#include <string>
#include <vector>

namespace kgm {

enum class PotentialFamily { PurePower, CubicQuintic };

struct PotentialSpec {
    PotentialFamily family = PotentialFamily::PurePower;
    double m = 1.0;        // mass, > 0
    double b = 1.0, p = 4.0;   // pure-power
    double b1 = 1.0, b2 = 0.1; // cubic-quintic

    static PotentialSpec pure_power(double m, double p, double b);
    static PotentialSpec cubic_quintic(double m, double b1, double b2);

    double U(double f) const;
    double nonlin(double f) const;       // U'
    double nonlin_deriv(double f) const; // U''
    double beta(double f) const;         // U'/f, continuous through f = 0
    double beta_slope(double f) const;   // f beta'(f) = U'' - beta
    double V(double phi) const { return 0.5 * m * m * phi * phi - U(phi); }
    double Vprime(double phi) const { return m * m * phi - nonlin(phi); }

    // growth exponent in the Lipschitz envelope |V'(x)-V'(y)| <= C|x-y|(1+|x|^g+|y|^g)
    double lipschitz_growth() const;
};

// U(|phi|), the quantity the quadrature oracle cross-checks
double eval_potential(const PotentialSpec& spec, double phi);

struct HypothesisCheck {
    std::string name;   // "Exist1" ... "Exist4", "U1", "U2"
    std::string status; // "satisfied" | "violated" | "indeterminate" | "assumed"
    std::string detail;
    double value = 0.0; // witness (l1, zeta, ...) when meaningful
};

struct HypothesisReport {
    double omega = 0.0;
    std::vector<HypothesisCheck> checks;
    bool admissible() const; // no check in state "violated"
    const HypothesisCheck* find(const std::string& name) const;
};

// Frequency-dependent solvability screen for the ground-state problem
// -lap f + (m^2 - omega^2) f = U'(f).  Scans W(f) = U(f) - (m^2-omega^2) f^2/2
// for its first sign change l1 and for an amplitude zeta with W(zeta) > 0.
HypothesisReport check_existence_hypotheses(const PotentialSpec& spec, double omega);

} // namespace kgm
