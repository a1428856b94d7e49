#pragma once

#include "tailwedge/cir_riccati.hpp"
#include "tailwedge/mgf_model.hpp"

namespace tailwedge {

// Gamma(k, theta): Lambda(p) = -k ln(1 - theta p), explodes at 1/theta.
// The exact survival function makes this the workhorse oracle for the
// alpha = 0 class.
struct GammaParams {
    double k = 1.0;      // shape
    double theta = 1.0;  // scale
    void validate() const;
};

// Variance-gamma: MGF(p) = (g m / ((m - p)(p + g)))^c, explodes at m with a
// logarithmic phi; declared alpha = 0 and used for band arithmetic only.
struct VarianceGammaParams {
    double c = 1.0;
    double g = 1.0;
    double m = 1.0;
    void validate() const;
};

struct HestonParams {
    cir::CirParams cir;
    double rho = 0.0;  // price-variance correlation, |rho| <= 1
    void validate() const;
};

MgfModel gamma_model(const GammaParams& params);

// ln P(Z > R) for Gamma(k, theta). Integer k goes through the exact Erlang
// sum; general k through the regularized upper incomplete gamma (series /
// continued fraction split at x = k + 1, relative tolerance 1e-12).
double gamma_exact_log_sf(const GammaParams& params, double R);

MgfModel vg_model(const VarianceGammaParams& params);

// ln E e^{p X_t} for the Heston log-price: a Girsanov shift moves the
// correlation into the drift (b -> b - rho sigma p) and leaves the plain CIR
// time-average transform with l2 = (p^2 - p)/2.
double heston_log_mgf(const HestonParams& params, double p, double t);

}  // namespace tailwedge
