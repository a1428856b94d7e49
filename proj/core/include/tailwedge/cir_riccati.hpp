#pragma once

#include <optional>

#include "tailwedge/errors.hpp"

namespace tailwedge::cir {

// Square-root diffusion dV = (a - b V) dt + sigma sqrt(V) dW, V_0 = v.
struct CirParams {
    double a = 0.0;      // constant drift
    double b = 0.0;      // reversion rate (any sign)
    double sigma = 1.0;  // diffusion coefficient, > 0
    double v = 0.0;      // initial value

    double nu() const { return 2.0 * a / (sigma * sigma); }
    void validate() const;
};

// The joint transform E exp(l1 V_T + l2 I_T), with I_t the running integral
// of V, equals exp(a phi(T) + v psi(T)) where psi solves the Riccati problem
//   psi' = (sigma^2/2) psi^2 - b psi + l2,   psi(0) = l1,
// and phi is the running integral of psi. The closed form splits on the sign
// of b^2 - 2 l2 sigma^2 and, in the subcritical case, on the position of
// l1 - b/sigma^2 relative to +-alpha.
enum class RiccatiRegime {
    SubcriticalOutside,  // 2 l2 s^2 < b^2 and |l1 - b/s^2| > alpha
    SubcriticalInside,   // 2 l2 s^2 < b^2 and |l1 - b/s^2| <= alpha
    Critical,            // 2 l2 s^2 = b^2 (within tolerance)
    Supercritical,       // 2 l2 s^2 > b^2
};

struct RiccatiCase {
    RiccatiRegime tag = RiccatiRegime::Critical;
    double alpha_or_beta = 0.0;      // alpha (subcritical) or beta (supercritical)
    std::optional<double> C;         // subcritical constant; may be +inf at the
                                     // lower fixed point, absent otherwise
};

struct RiccatiEval {
    double psi = 0.0;
    double phi = 0.0;
    double t_star = 0.0;  // +inf when the transform never explodes
    RiccatiCase regime;
};

// Regime of the pair (l1, l2). Inputs within 1e-12 * max(1, b^2) of the
// critical boundary are classified Critical; inputs within 1e-8 of it emit a
// conditioning warning (the subcritical formulas lose precision as alpha -> 0).
RiccatiCase classify(const CirParams& params, double l1, double l2);

// Explosion time of psi (+inf when none).
double t_star(const CirParams& params, double l1, double l2);

// Closed-form psi and phi; both throw MomentExplodedError for t >= t_star.
double psi(const CirParams& params, double l1, double l2, double t);
double phi(const CirParams& params, double l1, double l2, double t);

// a * phi + v * psi = ln E exp(l1 V_t + l2 I_t).
double log_mgf(const CirParams& params, double l1, double l2, double t);

// psi, phi, t_star and the regime in one call.
RiccatiEval evaluate(const CirParams& params, double l1, double l2, double t);

// Reference adaptive Runge-Kutta integration of (psi, phi), independent of
// the closed forms. Integrates to `t`; if psi crosses 1e12 * max(1, |l1|)
// first, stops there and reports the crossing time in t_star (otherwise
// t_star is +inf, which only means "no explosion seen before t").
RiccatiEval ode_reference(const CirParams& params, double l1, double l2, double t,
                          double tol);

// Conditional mean and variance of V_t and mean of I_t (linear moment ODEs;
// stable for any b including b = 0).
double mean_v(const CirParams& params, double t);
double mean_i(const CirParams& params, double t);
double var_v(const CirParams& params, double t);

}  // namespace tailwedge::cir
