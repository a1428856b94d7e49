#include "tailwedge/analytic_models.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "tailwedge/errors.hpp"

namespace tailwedge {

namespace {

// Regularized upper incomplete gamma Q(a, x) in log space.
// Series for P(a, x) when x < a + 1, Lentz continued fraction otherwise.
double log_gamma_q(double a, double x) {
    constexpr int kMaxIter = 500;
    constexpr double kRelTol = 1e-12;
    if (x <= 0.0) return 0.0;  // Q(a, 0) = 1

    const double log_prefix = -x + a * std::log(x) - std::lgamma(a);
    if (x < a + 1.0) {
        // P(a,x) = prefix * sum_{n>=0} x^n / (a (a+1) ... (a+n))
        double term = 1.0 / a;
        double sum = term;
        double ap = a;
        for (int n = 0; n < kMaxIter; ++n) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::abs(term) < kRelTol * std::abs(sum)) {
                const double p = std::exp(log_prefix) * sum;
                return std::log1p(-p);
            }
        }
        throw NoConvergenceError("series-nonconvergence in incomplete gamma (series)");
    }
    // Q(a,x) = prefix * CF, modified Lentz on b0 = x + 1 - a.
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kRelTol) return log_prefix + std::log(h);
    }
    throw NoConvergenceError("series-nonconvergence in incomplete gamma (cf)");
}

double log_sum_exp(const std::vector<double>& terms) {
    const double m = *std::max_element(terms.begin(), terms.end());
    double s = 0.0;
    for (double t : terms) s += std::exp(t - m);
    return m + std::log(s);
}

}  // namespace

void GammaParams::validate() const {
    if (!(k > 0.0)) throw ArgumentError("gamma: require k > 0");
    if (!(theta > 0.0)) throw ArgumentError("gamma: require theta > 0");
}

void VarianceGammaParams::validate() const {
    if (!(c > 0.0 && g > 0.0 && m > 0.0))
        throw ArgumentError("vg: require c, g, m > 0");
}

void HestonParams::validate() const {
    cir.validate();
    if (!(std::abs(rho) <= 1.0)) throw ArgumentError("heston: require |rho| <= 1");
}

MgfModel gamma_model(const GammaParams& params) {
    params.validate();
    const double k = params.k, theta = params.theta;
    MgfModel model;
    model.mu_star = 1.0 / theta;
    model.log_mgf = [k, theta](double p) {
        if (!(p < 1.0 / theta))
            throw MomentExplodedError("moment-exploded: p >= 1/theta", 1.0 / theta);
        return -k * std::log1p(-theta * p);
    };
    model.log_mgf_prime = [k, theta](double p) { return k * theta / (1.0 - theta * p); };
    model.alpha = 0.0;
    model.mean = k * theta;
    return model;
}

double gamma_exact_log_sf(const GammaParams& params, double R) {
    params.validate();
    if (!(R > 0.0)) throw ArgumentError("gamma-log-sf: require R > 0");
    const double x = R / params.theta;
    const double k_round = std::round(params.k);
    if (std::abs(params.k - k_round) < 1e-12 && k_round >= 1.0) {
        // Erlang: P(Z > R) = e^{-x} sum_{j<k} x^j / j!
        const int ki = static_cast<int>(k_round);
        std::vector<double> terms(ki);
        for (int j = 0; j < ki; ++j)
            terms[j] = j * std::log(x) - std::lgamma(static_cast<double>(j) + 1.0);
        return -x + log_sum_exp(terms);
    }
    return log_gamma_q(params.k, x);
}

MgfModel vg_model(const VarianceGammaParams& params) {
    params.validate();
    const double c = params.c, g = params.g, m = params.m;
    MgfModel model;
    model.mu_star = m;
    model.log_mgf = [c, g, m](double p) {
        if (!(p < m)) throw MomentExplodedError("moment-exploded: p >= m", m);
        return -c * (std::log1p(-p / m) + std::log1p(p / g));
    };
    model.log_mgf_prime = [c, g, m](double p) {
        return c * (1.0 / (m - p) - 1.0 / (g + p));
    };
    model.alpha = 0.0;  // logarithmic divergence: boundary of the class
    model.mean = c * (1.0 / m - 1.0 / g);
    return model;
}

double heston_log_mgf(const HestonParams& params, double p, double t) {
    params.validate();
    if (!(t > 0.0)) throw ArgumentError("heston: require t > 0");
    cir::CirParams shifted = params.cir;
    shifted.b = params.cir.b - params.rho * params.cir.sigma * p;
    const double l2 = 0.5 * (p * p - p);
    return cir::log_mgf(shifted, 0.0, l2, t);
}

}  // namespace tailwedge
