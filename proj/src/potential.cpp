#include "kgm/potential.hpp"
#include "kgm/errors.hpp"

#include <cmath>

namespace kgm {

PotentialSpec PotentialSpec::pure_power(double m, double p, double b) {
    if (!(m > 0.0)) throw UsageError("potential: m must be positive", "potential.m");
    if (!(p > 3.0 && p < 6.0)) throw UsageError("potential: pure-power exponent must lie in (3,6)", "potential.p");
    PotentialSpec s;
    s.family = PotentialFamily::PurePower;
    s.m = m; s.p = p; s.b = b;
    return s;
}

PotentialSpec PotentialSpec::cubic_quintic(double m, double b1, double b2) {
    if (!(m > 0.0)) throw UsageError("potential: m must be positive", "potential.m");
    if (!(b1 > 0.0) || !(b2 > 0.0)) throw UsageError("potential: cubic-quintic needs b1 > 0, b2 > 0", "potential.b1");
    PotentialSpec s;
    s.family = PotentialFamily::CubicQuintic;
    s.m = m; s.b1 = b1; s.b2 = b2;
    return s;
}

namespace {
// pow dominates the shooting cost; p = 4 and 5 are the common exponents
inline double powfast(double f, double q) {
    if (q == 2.0) return f * f;
    if (q == 3.0) return f * f * f;
    if (q == 4.0) { double f2 = f * f; return f2 * f2; }
    if (q == 5.0) { double f2 = f * f; return f2 * f2 * f; }
    return std::pow(f, q);
}
} // namespace

double PotentialSpec::U(double f) const {
    f = std::fabs(f);
    if (family == PotentialFamily::PurePower) return b * powfast(f, p) / p;
    double f2 = f * f;
    return f2 * f2 * (0.25 * b1 - b2 * f2 / 6.0);
}

double PotentialSpec::nonlin(double f) const {
    f = std::fabs(f);
    if (family == PotentialFamily::PurePower) return b * powfast(f, p - 1.0);
    double f2 = f * f;
    return f2 * f * (b1 - b2 * f2);
}

double PotentialSpec::nonlin_deriv(double f) const {
    f = std::fabs(f);
    if (family == PotentialFamily::PurePower) return b * (p - 1.0) * powfast(f, p - 2.0);
    double f2 = f * f;
    return f2 * (3.0 * b1 - 5.0 * b2 * f2);
}

double PotentialSpec::beta(double f) const {
    f = std::fabs(f);
    if (family == PotentialFamily::PurePower) return b * powfast(f, p - 2.0); // p > 3, so -> 0 at f = 0
    double f2 = f * f;
    return f2 * (b1 - b2 * f2);
}

double PotentialSpec::beta_slope(double f) const { return nonlin_deriv(f) - beta(f); }

double PotentialSpec::lipschitz_growth() const {
    if (family == PotentialFamily::PurePower) {
        double kappa = 6.0 - p; // in (0,3) for admissible p
        return 4.0 - kappa;     // = p - 2
    }
    return 3.0; // kappa = 1
}

double eval_potential(const PotentialSpec& spec, double phi) { return spec.U(phi); }

bool HypothesisReport::admissible() const {
    for (const auto& c : checks)
        if (c.status == "violated") return false;
    return true;
}

const HypothesisCheck* HypothesisReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

HypothesisReport check_existence_hypotheses(const PotentialSpec& spec, double omega) {
    HypothesisReport rep;
    rep.omega = omega;
    const double kap2 = spec.m * spec.m - omega * omega;

    // Exist1: smooth superlinear nonlinearity, U'(0) = U''(0) = 0.
    // Holds by construction for both families; recorded with the small-f slope.
    rep.checks.push_back({"Exist1", "satisfied",
                          "U'(0)=U''(0)=0 by construction", spec.nonlin_deriv(1e-8)});

    // Exist2: subcritical growth of U' at infinity (power < 5), or a
    // defocusing leading term that caps the focusing part.
    if (spec.family == PotentialFamily::PurePower) {
        rep.checks.push_back({"Exist2",
                              spec.p < 6.0 ? "satisfied" : "violated",
                              "U' ~ f^(p-1), p-1 < 5", spec.p - 1.0});
    } else {
        rep.checks.push_back({"Exist2", "satisfied",
                              "quintic term defocusing", -spec.b2});
    }

    // Exist4 first since Exist3/U1 presume kap2 > 0
    if (!(kap2 > 0.0)) {
        rep.checks.push_back({"Exist3", "indeterminate", "needs omega^2 < m^2", 0.0});
        rep.checks.push_back({"Exist4", "violated", "omega^2 >= m^2", kap2});
        rep.checks.push_back({"U1", "indeterminate", "needs omega^2 < m^2", 0.0});
        rep.checks.push_back({"U2", "assumed", "not machine-checkable", 0.0});
        return rep;
    }
    rep.checks.push_back({"Exist4", "satisfied", "omega^2 < m^2", kap2});

    auto W = [&](double f) { return spec.U(f) - 0.5 * kap2 * f * f; };

    // Scan range: pure power always goes positive eventually (p < 6 means
    // U grows faster than f^2); cubic-quintic is bounded above by
    // 3 b1^2/(32 b2) - kap2 f^2/2, so the maximum of W sits near
    // f^2 = (3/4)(b1/b2) and nothing past ~2x that can help.
    double fmax_scan;
    if (spec.family == PotentialFamily::PurePower)
        fmax_scan = 4.0 * std::pow(2.0 * kap2 * spec.p / (2.0 * spec.b), 1.0 / (spec.p - 2.0)) + 4.0;
    else
        fmax_scan = 2.0 * std::sqrt(1.5 * spec.b1 / spec.b2) + 1.0;

    const int nscan = 20000;
    double l1 = 0.0, zeta = 0.0, wzeta = 0.0;
    double fprev = 0.0, wprev = 0.0;
    for (int i = 1; i <= nscan; ++i) {
        double f = fmax_scan * double(i) / nscan;
        double w = W(f);
        if (l1 == 0.0 && wprev < 0.0 && w >= 0.0) {
            // bisect the bracket for the sign change
            double lo = fprev, hi = f;
            for (int it = 0; it < 80; ++it) {
                double mid = 0.5 * (lo + hi);
                (W(mid) < 0.0 ? lo : hi) = mid;
            }
            l1 = 0.5 * (lo + hi);
        }
        if (w > wzeta) { wzeta = w; zeta = f; }
        fprev = f; wprev = w;
    }

    if (wzeta > 0.0) {
        rep.checks.push_back({"Exist3", "satisfied", "U(zeta) > (m^2-omega^2) zeta^2/2", zeta});
    } else {
        // cubic-quintic has a closed-form cap, so a failed scan is a proof there
        bool provable = spec.family == PotentialFamily::CubicQuintic &&
                        3.0 * spec.b1 * spec.b1 / (32.0 * spec.b2) <= 0.5 * kap2;
        rep.checks.push_back({"Exist3", provable ? "violated" : "indeterminate",
                              "no amplitude with U > (m^2-omega^2) f^2/2 found in scan", fmax_scan});
    }

    if (l1 > 0.0) {
        double slope = spec.nonlin_deriv(l1) - kap2; // W''(l1) > 0 wanted
        rep.checks.push_back({"U1", slope > 0.0 ? "satisfied" : "indeterminate",
                              "first sign change of U - (m^2-omega^2) f^2/2", l1});
    } else {
        rep.checks.push_back({"U1", "indeterminate", "no sign change located in scan", fmax_scan});
    }

    rep.checks.push_back({"U2", "assumed", "not machine-checkable", 0.0});
    return rep;
}

} // namespace kgm
