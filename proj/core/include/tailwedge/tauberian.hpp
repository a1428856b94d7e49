#pragma once

#include <span>
#include <utility>
#include <vector>

#include "tailwedge/mgf_model.hpp"

namespace tailwedge {

// Lambda evaluated through the explosion-centred change of variable,
//   phi(x) = Lambda(mu_star - 1/x),  x > 1/mu_star.
// phi is the function whose regular-variation index `alpha` the model declares.
double phi_shifted(const MgfModel& model, double x);

// Lambda'(p): the model's closed form when present, otherwise a central
// difference with step min(1e-6, (mu_star - p)/10, p).
double log_mgf_derivative(const MgfModel& model, double p);

// Solve Lambda'(p*) = R on (0, mu_star) by bisection (bracket width
// 1e-13 * mu_star) plus three Newton polish steps, and return
// (R, p*, Lambda*(R)). Throws BelowMeanError for R <= Lambda'(0) and
// NoConvergenceError when the bracket cannot be established.
LegendrePoint legendre(const MgfModel& model, double R);

// Chernoff upper bound P(Z > R) <= exp(-Lambda*(R)).
double chernoff_upper(const MgfModel& model, double R);

// Envelope of ln P(Z > R) driven by the declared regular-variation index.
TailBand tail_band(const MgfModel& model, double R);

// Exponent of the Laplace-window integrand, relative to its peak at z = 1:
//   (p*(R) - p*(Rz)) R z + Lambda(p*(Rz)) - Lambda(p*(R)).
// Zero at z = 1, strictly negative elsewhere.
double window_exponent(const MgfModel& model, double R, double z);

// integral over [R^(beta-1), infinity) of z^gamma * exp(window_exponent).
// Split at the z = 1 peak; the upper tail is truncated where the integrand
// falls below 1e-16 of the peak value.
double laplace_window_integral(const MgfModel& model, double R, double gamma, double beta);

// Regular-variation indices of 1/(p*)' and 1/(p*)'' estimated from a
// geometric R grid (5 points per decade) by log-log least squares on central
// finite differences of p*. Returns (index1, index2).
std::pair<double, double> pstar_derivative_indices(const MgfModel& model, double R_lo,
                                                   double R_hi);

// Least-squares slope of ln f against ln x; the samples must be positive and
// span at least one decade in x.
double rv_index_estimate(std::span<const std::pair<double, double>> samples);

}  // namespace tailwedge
