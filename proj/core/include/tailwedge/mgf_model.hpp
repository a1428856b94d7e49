#pragma once

#include <functional>
#include <optional>
#include <utility>

namespace tailwedge {

// A distribution seen purely through its cumulant generating function
// Lambda(p) = ln E e^{pZ}, finite on [0, mu_star) and exploding at the
// critical moment mu_star. Everything downstream (Legendre transforms,
// Chernoff bounds, tail bands) works off this contract alone.
//
// log_mgf_prime is optional: models with a closed-form Lambda' should set it;
// otherwise the transform falls back to the central-difference scheme, which
// is what keeps the machinery usable when Lambda is itself only a numerical
// recipe.
struct MgfModel {
    double mu_star = 0.0;
    std::function<double(double)> log_mgf;
    std::function<double(double)> log_mgf_prime;  // may be empty
    std::optional<double> alpha;                  // regular-variation index of phi
    std::optional<double> mean;                   // Lambda'(0)
};

// One point of the Fenchel-Legendre transform: Lambda'(p_star) = R and
// lambda_star = p_star * R - Lambda(p_star).
struct LegendrePoint {
    double R = 0.0;
    double p_star = 0.0;
    double lambda_star = 0.0;
};

// Asymptotic envelope for ln P(Z > R):
//   log_upper        = -Lambda*(R)                       (Chernoff, every R)
//   exponent_interval brackets limsup (ln P + Lambda*)/ln R
//   log_lower_limsup = -Lambda*(R) - (alpha+2)/(2(alpha+1)) * ln R
// The interval constrains the limsup only, not each finite R.
struct TailBand {
    double R = 0.0;
    double log_upper = 0.0;
    std::pair<double, double> exponent_interval{0.0, 0.0};
    double log_lower_limsup = 0.0;
};

}  // namespace tailwedge
