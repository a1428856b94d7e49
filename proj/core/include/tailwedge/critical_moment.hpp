#pragma once

#include <optional>
#include <utility>

#include "tailwedge/cir_riccati.hpp"
#include "tailwedge/mgf_model.hpp"

namespace tailwedge::cir {

// A fixed superposition Z = l1 V_t + l2 I_t observed at horizon t. Scaling
// the pair by mu > 0 scales the explosion time through t*(mu l1, mu l2), so
// the critical moments of Z are roots of t*(mu l1, mu l2) = t.
struct SuperpositionSpec {
    double l1 = 0.0;
    double l2 = 0.0;
    double t = 0.0;
};

enum class Side { plus, minus };

// omega / epsilon + log_coeff * ln(1/epsilon) + constant fitted to
// Lambda(mu_star - epsilon) over a geometric epsilon grid.
struct OmegaFit {
    double omega = 0.0;
    double log_coeff = 0.0;
    double constant = 0.0;
    double max_residual = 0.0;
};

// Closed-form leading coefficient of Lambda near the critical moment.
// log_coeff is reported as +2a/sigma^2 in the convention
//   Lambda(mu* - eps) = omega/eps + log_coeff * ln(1/eps) + O(1);
// the empirical fit is the arbiter of the sign.
struct OmegaClosed {
    double omega = 0.0;
    double log_coeff = 0.0;
};

struct CriticalMomentResult {
    double mu_plus = 0.0;  // +inf when max(l1,l2) <= 0
    std::optional<OmegaFit> plus;
    double mu_minus = 0.0;  // +inf when min(l1,l2) >= 0
    std::optional<OmegaFit> minus;
};

// Tail-center and exponent interval for ln P(Z > R):
//   center = -mu_plus * R + 2 sqrt(omega_plus * R),
//   c_interval = [a/sigma^2 - 3/4, a/sigma^2].
// Asymptotic (limsup) statement; no finite-R guarantee is claimed.
struct CorollaryBand {
    double R = 0.0;
    double center = 0.0;
    std::pair<double, double> c_interval{0.0, 0.0};
};

// Smallest mu > 0 with t*(mu l1, mu l2) = t; requires max(l1, l2) > 0.
// Doubling bracket plus bisection on the (strictly decreasing) t* map.
double mu_plus(const CirParams& params, const SuperpositionSpec& spec);

// Left-tail critical moment via sign delegation: mu_minus(l) = mu_plus(-l).
double mu_minus(const CirParams& params, const SuperpositionSpec& spec);

// Leading coefficient from the explicit case formulas (supercritical tangent
// case and subcritical log case). Throws when the critical moment lands on
// the boundary between them, where neither expansion applies.
OmegaClosed omega_closed(const CirParams& params, const SuperpositionSpec& spec, Side side);

// Regression estimate of (omega, log_coeff) on the epsilon grid
// mu_star * {1e-2, 1e-2.5, ..., 1e-6}. The default omega extraction.
OmegaFit omega_fit(const CirParams& params, const SuperpositionSpec& spec, Side side);

CorollaryBand corollary_band(const CirParams& params, const SuperpositionSpec& spec,
                             double R);

// Both sides, each populated where the sign precondition holds.
CriticalMomentResult critical_moments(const CirParams& params, const SuperpositionSpec& spec);

// Package Z = l1 V_t + l2 I_t as an MgfModel for the Tauberian machinery
// (alpha = 1, mean from the linear moment ODEs).
MgfModel mgf_model(const CirParams& params, const SuperpositionSpec& spec);

}  // namespace tailwedge::cir
