#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "tailwedge/cir_riccati.hpp"
#include "tailwedge/critical_moment.hpp"
#include "tailwedge/rng.hpp"

namespace tailwedge::mc {

struct McConfig {
    std::uint64_t n_paths = 200000;
    std::uint32_t n_steps = 256;
    std::uint64_t seed = 0;
    std::uint32_t workers = 0;  // 0 = auto (hardware concurrency)
    void validate() const;
};

struct McTailEstimate {
    double R = 0.0;
    double p_hat = 0.0;
    double ci_low = 0.0;   // 95% Wilson interval (rule of three at zero counts)
    double ci_high = 0.0;
    std::uint64_t n_exceed = 0;
    McConfig config;
};

struct McMgfEstimate {
    double p = 0.0;
    double estimate = 0.0;
    double std_error = 0.0;
};

// Exact transition draw V_{s+dt} | V_s = v_from: scaled noncentral chi-square
// with scale sigma^2 (1 - e^{-b dt}) / (4b), dof 4a/sigma^2 and noncentrality
// v_from e^{-b dt} / scale. dof > 1 uses the (normal + sqrt(ncp))^2 + chi^2
// decomposition, otherwise the Poisson mixture of central chi-squares.
double sample_transition(const cir::CirParams& params, double v_from, double dt,
                         rng::PathRng& rng);

// Chain n_steps exact transitions on the uniform grid; I_t by the trapezoid
// rule over the grid values. Returns (V_t, I_t).
std::pair<double, double> simulate_path(const cir::CirParams& params, double t,
                                        std::uint32_t n_steps, rng::PathRng& rng);

// Empirical P(Z > R) for every R in one sweep, with 95% Wilson intervals.
// Bitwise deterministic for a fixed seed under any worker count.
std::vector<McTailEstimate> estimate_tail(const cir::CirParams& params,
                                          const cir::SuperpositionSpec& spec,
                                          const std::vector<double>& R_list,
                                          const McConfig& config);

// Empirical E e^{p Z} with standard errors. Guards p <= 0.8 mu_plus (the
// second moment of the estimator blows up past 0.5 mu_plus, which only earns
// a diagnostic flag).
std::vector<McMgfEstimate> estimate_mgf(const cir::CirParams& params,
                                        const cir::SuperpositionSpec& spec,
                                        const std::vector<double>& p_list,
                                        const McConfig& config);

// 95% Wilson score interval for k successes out of n.
std::pair<double, double> wilson_interval(std::uint64_t k, std::uint64_t n);

}  // namespace tailwedge::mc
