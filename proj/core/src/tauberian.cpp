#include "tailwedge/tauberian.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tailwedge/errors.hpp"
#include "tailwedge/quadrature.hpp"

namespace tailwedge {

namespace {

double mean_of(const MgfModel& model) {
    if (model.mean) return *model.mean;
    // One-sided estimate of Lambda'(0); Lambda(0) = 0 by contract.
    const double h = 1e-7 * model.mu_star;
    return model.log_mgf(h) / h;
}

// Least-squares slope of y against x.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / static_cast<double>(n);
    const double my = sy / static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    return sxy / sxx;
}

}  // namespace

double phi_shifted(const MgfModel& model, double x) {
    if (!(x > 1.0 / model.mu_star))
        throw NumericError("phi-shifted domain: require x > 1/mu_star");
    return model.log_mgf(model.mu_star - 1.0 / x);
}

double log_mgf_derivative(const MgfModel& model, double p) {
    if (model.log_mgf_prime) return model.log_mgf_prime(p);
    const double h = std::min({1e-6, (model.mu_star - p) / 10.0, p});
    return (model.log_mgf(p + h) - model.log_mgf(p - h)) / (2.0 * h);
}

LegendrePoint legendre(const MgfModel& model, double R) {
    const double mu = model.mu_star;
    const double mean = mean_of(model);
    if (!(R > mean)) throw BelowMeanError("below-mean: require R > Lambda'(0)");

    double lo = 1e-8 * mu;
    const double hi = mu * (1.0 - 1e-12);
    if (log_mgf_derivative(model, hi) < R)
        throw NoConvergenceError("no-convergence: Lambda' below R across the bracket");
    // R barely above the mean can place the root left of the default start.
    int shrink = 0;
    while (log_mgf_derivative(model, lo) > R) {
        lo *= 1e-3;
        if (++shrink > 80)
            throw NoConvergenceError("no-convergence: lower bracket collapse");
    }

    double a = lo, b = hi;
    while (b - a > 1e-13 * mu) {
        const double mid = 0.5 * (a + b);
        (log_mgf_derivative(model, mid) < R ? a : b) = mid;
    }
    double p = 0.5 * (a + b);

    // Newton polish on g(p) = Lambda'(p) - R with a differenced g'.
    for (int it = 0; it < 3; ++it) {
        const double g = log_mgf_derivative(model, p) - R;
        const double h2 = std::min({1e-7, (mu - p) / 16.0, p});
        const double gp = (log_mgf_derivative(model, p + h2) -
                           log_mgf_derivative(model, p - h2)) /
                          (2.0 * h2);
        if (!(gp > 0.0) || !std::isfinite(gp)) break;
        const double next = p - g / gp;
        if (next <= a || next >= b) break;
        p = next;
    }

    return LegendrePoint{R, p, p * R - model.log_mgf(p)};
}

double chernoff_upper(const MgfModel& model, double R) {
    return std::exp(-legendre(model, R).lambda_star);
}

TailBand tail_band(const MgfModel& model, double R) {
    if (!model.alpha) throw AlphaUnknownError("alpha-unknown: model declares no index");
    const double alpha = *model.alpha;
    const double lower_exp = -(alpha + 2.0) / (2.0 * (alpha + 1.0));
    const LegendrePoint pt = legendre(model, R);
    TailBand band;
    band.R = R;
    band.log_upper = -pt.lambda_star;
    band.exponent_interval = {lower_exp, 0.0};
    band.log_lower_limsup = -pt.lambda_star + lower_exp * std::log(R);
    return band;
}

double window_exponent(const MgfModel& model, double R, double z) {
    const LegendrePoint at_r = legendre(model, R);
    const LegendrePoint at_rz = legendre(model, R * z);
    return (at_r.p_star - at_rz.p_star) * R * z + model.log_mgf(at_rz.p_star) -
           model.log_mgf(at_r.p_star);
}

double laplace_window_integral(const MgfModel& model, double R, double gamma, double beta) {
    if (!(beta > 0.0 && beta < 1.0))
        throw PreconditionError("laplace-window: require beta in (0,1)");
    const LegendrePoint at_r = legendre(model, R);
    const double lambda_r = model.log_mgf(at_r.p_star);

    const auto integrand = [&](double z) {
        const LegendrePoint at_rz = legendre(model, R * z);
        const double expo = (at_r.p_star - at_rz.p_star) * R * z +
                            model.log_mgf(at_rz.p_star) - lambda_r;
        return std::pow(z, gamma) * std::exp(expo);
    };

    const double z_lo = std::pow(R, beta - 1.0);
    // The integrand peaks at z = 1 with value exactly 1; march the upper
    // truncation point out until the tail is negligible.
    double z_hi = 2.0;
    while (integrand(z_hi) > 1e-16) {
        z_hi *= 2.0;
        if (z_hi > 0x1p40)
            throw QuadratureError("quadrature-failure: upper tail does not decay");
    }

    const AdaptiveGaussKronrod gk(1e-10, 1e-8, 2048);
    return gk.integrate(integrand, z_lo, 1.0) + gk.integrate(integrand, 1.0, z_hi);
}

std::pair<double, double> pstar_derivative_indices(const MgfModel& model, double R_lo,
                                                   double R_hi) {
    if (!(R_hi >= 10.0 * R_lo))
        throw PreconditionError("insufficient-span: require R_hi >= 10 * R_lo");
    const double decades = std::log10(R_hi / R_lo);
    const std::size_t n = static_cast<std::size_t>(std::ceil(5.0 * decades)) + 1;
    std::vector<double> r(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
        r[i] = R_lo * std::pow(R_hi / R_lo, static_cast<double>(i) / static_cast<double>(n - 1));
        p[i] = legendre(model, r[i]).p_star;
    }

    std::vector<double> lx1, ly1, lx2, ly2;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h1 = r[i + 1] - r[i];
        const double h2 = r[i] - r[i - 1];
        const double d1 = (p[i + 1] - p[i - 1]) / (h1 + h2);
        const double d2 = 2.0 * ((p[i + 1] - p[i]) / h1 - (p[i] - p[i - 1]) / h2) / (h1 + h2);
        if (d1 > 0.0) {
            lx1.push_back(std::log(r[i]));
            ly1.push_back(-std::log(d1));
        }
        if (d2 != 0.0) {
            lx2.push_back(std::log(r[i]));
            ly2.push_back(-std::log(std::abs(d2)));
        }
    }
    if (lx1.size() < 3 || lx2.size() < 3)
        throw NoConvergenceError("pstar-indices: too few usable grid points");
    return {ls_slope(lx1, ly1), ls_slope(lx2, ly2)};
}

double rv_index_estimate(std::span<const std::pair<double, double>> samples) {
    if (samples.size() < 2) throw PreconditionError("insufficient-span: need >= 2 samples");
    double x_min = samples[0].first, x_max = samples[0].first;
    std::vector<double> lx, ly;
    lx.reserve(samples.size());
    ly.reserve(samples.size());
    for (const auto& [x, f] : samples) {
        if (!(x > 0.0) || !(f > 0.0))
            throw PreconditionError("nonpositive-sample: require x > 0 and f(x) > 0");
        x_min = std::min(x_min, x);
        x_max = std::max(x_max, x);
        lx.push_back(std::log(x));
        ly.push_back(std::log(f));
    }
    if (!(x_max >= 10.0 * x_min))
        throw PreconditionError("insufficient-span: x range below one decade");
    return ls_slope(lx, ly);
}

}  // namespace tailwedge
