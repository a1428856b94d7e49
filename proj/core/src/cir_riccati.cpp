#include "tailwedge/cir_riccati.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tailwedge/diagnostics.hpp"

namespace tailwedge::cir {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = 3.14159265358979323846;

// ln|e^x - 1| without overflow or cancellation.
double log_abs_expm1(double x) {
    if (x > 0.5) return x + std::log1p(-std::exp(-x));
    if (x > 0.0) return std::log(std::expm1(x));
    if (x > -0.5) return std::log(-std::expm1(x));
    return std::log1p(-std::exp(x));
}

// ln(1 + e^x).
double log1p_exp(double x) {
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

// (1 - e^-x)/x, continuous through x = 0.
double em1(double x) {
    if (x == 0.0) return 1.0;
    return -std::expm1(-x) / x;
}

// (x - 1 + e^-x)/x^2, continuous through x = 0 (limit 1/2).
double em2(double x) {
    if (std::abs(x) < 1e-4) return 0.5 - x / 6.0 + x * x / 24.0;
    return (x - 1.0 + std::exp(-x)) / (x * x);
}

struct Decomposed {
    double s2;        // sigma^2
    double bs;        // b / sigma^2
    double lbar;      // l1 - b / sigma^2
    double disc;      // b^2 - 2 l2 sigma^2
};

Decomposed decompose(const CirParams& p, double l1, double l2) {
    const double s2 = p.sigma * p.sigma;
    return Decomposed{s2, p.b / s2, l1 - p.b / s2, p.b * p.b - 2.0 * l2 * s2};
}

[[noreturn]] void throw_exploded(double ts) {
    throw MomentExplodedError("moment-exploded at t*=" + std::to_string(ts), ts);
}

}  // namespace

void CirParams::validate() const {
    if (!(sigma > 0.0)) throw ArgumentError("cir: require sigma > 0");
    if (!(a >= 0.0)) throw ArgumentError("cir: require a >= 0");
    if (!(v >= 0.0)) throw ArgumentError("cir: require v >= 0");
}

RiccatiCase classify(const CirParams& params, double l1, double l2) {
    params.validate();
    const auto d = decompose(params, l1, l2);
    const double scale = std::max(1.0, params.b * params.b);
    RiccatiCase out;
    if (std::abs(d.disc) <= 1e-12 * scale) {
        out.tag = RiccatiRegime::Critical;
        out.alpha_or_beta = 0.0;
        return out;
    }
    if (std::abs(d.disc) <= 1e-8 * scale)
        diag::warn("riccati: (l1,l2) within 1e-8 of the critical boundary; "
                   "subcritical formulas lose precision as alpha -> 0");
    if (d.disc > 0.0) {
        const double alpha = std::sqrt(d.disc) / d.s2;
        out.alpha_or_beta = alpha;
        out.tag = std::abs(d.lbar) > alpha ? RiccatiRegime::SubcriticalOutside
                                           : RiccatiRegime::SubcriticalInside;
        out.C = std::abs((d.lbar - alpha) / (d.lbar + alpha));
    } else {
        out.tag = RiccatiRegime::Supercritical;
        out.alpha_or_beta = std::sqrt(-d.disc) / d.s2;
    }
    return out;
}

double t_star(const CirParams& params, double l1, double l2) {
    params.validate();
    const auto d = decompose(params, l1, l2);
    const RiccatiCase c = classify(params, l1, l2);
    switch (c.tag) {
        case RiccatiRegime::SubcriticalOutside:
        case RiccatiRegime::SubcriticalInside: {
            const double alpha = c.alpha_or_beta;
            if (d.lbar > alpha)
                return std::log((d.lbar + alpha) / (d.lbar - alpha)) / (alpha * d.s2);
            return kInf;
        }
        case RiccatiRegime::Critical:
            return d.lbar > 0.0 ? 2.0 / (d.s2 * d.lbar) : kInf;
        case RiccatiRegime::Supercritical: {
            const double beta = c.alpha_or_beta;
            return (2.0 / (beta * d.s2)) * (kPi / 2.0 - std::atan(d.lbar / beta));
        }
    }
    return kInf;
}

RiccatiEval evaluate(const CirParams& params, double l1, double l2, double t) {
    params.validate();
    if (!(t >= 0.0)) throw ArgumentError("riccati: require t >= 0");
    const auto d = decompose(params, l1, l2);
    RiccatiEval out;
    out.regime = classify(params, l1, l2);
    out.t_star = t_star(params, l1, l2);
    if (t >= out.t_star) throw_exploded(out.t_star);
    if (t == 0.0) {
        out.psi = l1;
        out.phi = 0.0;
        return out;
    }

    switch (out.regime.tag) {
        case RiccatiRegime::SubcriticalOutside:
        case RiccatiRegime::SubcriticalInside: {
            const double alpha = out.regime.alpha_or_beta;
            const double C = *out.regime.C;
            // l1 at a stationary point of the quadratic: psi stays put.
            if (C == 0.0 || std::isinf(C)) {
                out.psi = l1;
                out.phi = l1 * t;
                return out;
            }
            const double u0 = std::log(C);
            const double u = u0 + alpha * d.s2 * t;
            if (out.regime.tag == RiccatiRegime::SubcriticalOutside) {
                out.psi = d.bs - alpha * (1.0 + 2.0 / std::expm1(u));
                out.phi = (d.bs + alpha) * t -
                          (2.0 / d.s2) * (log_abs_expm1(u) - log_abs_expm1(u0));
            } else {
                out.psi = d.bs - alpha * (1.0 - 2.0 / (std::exp(u) + 1.0));
                out.phi = (d.bs + alpha) * t -
                          (2.0 / d.s2) * (log1p_exp(u) - log1p_exp(u0));
            }
            return out;
        }
        case RiccatiRegime::Critical: {
            const double w = 0.5 * d.s2 * d.lbar * t;  // < 1 below t_star
            out.psi = d.lbar / (1.0 - w) + d.bs;
            out.phi = d.bs * t - (2.0 / d.s2) * std::log1p(-w);
            return out;
        }
        case RiccatiRegime::Supercritical: {
            const double beta = out.regime.alpha_or_beta;
            const double g0 = std::atan(d.lbar / beta);
            const double gt = 0.5 * beta * d.s2 * t + g0;
            const double cgt = std::cos(gt);
            if (!(cgt > 0.0)) throw_exploded(out.t_star);
            out.psi = d.bs + beta * std::tan(gt);
            out.phi = d.bs * t + (2.0 / d.s2) * (std::log(std::cos(g0)) - std::log(cgt));
            return out;
        }
    }
    return out;
}

double psi(const CirParams& params, double l1, double l2, double t) {
    return evaluate(params, l1, l2, t).psi;
}

double phi(const CirParams& params, double l1, double l2, double t) {
    return evaluate(params, l1, l2, t).phi;
}

double log_mgf(const CirParams& params, double l1, double l2, double t) {
    const RiccatiEval e = evaluate(params, l1, l2, t);
    return params.a * e.phi + params.v * e.psi;
}

RiccatiEval ode_reference(const CirParams& params, double l1, double l2, double t,
                          double tol) {
    params.validate();
    if (!(t > 0.0)) throw ArgumentError("ode-reference: require t > 0");
    if (!(tol > 0.0)) throw ArgumentError("ode-reference: require tol > 0");

    const double sig2 = params.sigma * params.sigma;
    const auto rhs_psi = [&](double y) { return 0.5 * sig2 * y * y - params.b * y + l2; };
    const double blowup = 1e12 * std::max(1.0, std::abs(l1));

    // Dormand-Prince 5(4), FSAL.
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                            e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                            e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

    double tc = 0.0, y = l1, q = 0.0;  // y = psi, q = phi
    double k1 = rhs_psi(y);
    double h = std::min(t, 1e-3 / (1.0 + std::abs(k1)));

    RiccatiEval out;
    out.regime = classify(params, l1, l2);
    out.t_star = kInf;

    // Near a pole psi ~ 2/(sigma^2 (t*-t)); the remaining gap is recovered
    // analytically once psi is past the detection threshold, which keeps the
    // blowup estimate sharp however the last steps land.
    const auto pole_time = [&](double t_now, double psi_now) {
        return t_now + 2.0 / (sig2 * psi_now);
    };

    while (tc < t) {
        h = std::min(h, t - tc);
        if (h < 1e-14 * t) {
            // Steps collapse either against a pole (psi already diverging,
            // report the explosion) or for a genuinely stuck integration.
            if (y > 1e6 * std::max(1.0, std::abs(l1))) {
                out.t_star = pole_time(tc, y);
                break;
            }
            throw StepUnderflowError("step-underflow in the Riccati reference integrator");
        }

        // psi stage values double as the phi stages since phi' = psi.
        const double s2 = y + h * a21 * k1;
        const double k2 = rhs_psi(s2);
        const double s3 = y + h * (a31 * k1 + a32 * k2);
        const double k3 = rhs_psi(s3);
        const double s4 = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        const double k4 = rhs_psi(s4);
        const double s5 = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        const double k5 = rhs_psi(s5);
        const double s6 = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        const double k6 = rhs_psi(s6);
        const double y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const double k7 = rhs_psi(y_new);
        const double dq = h * (b1 * y + b3 * s3 + b4 * s4 + b5 * s5 + b6 * s6);

        const double err_psi =
            h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double err_phi =
            h * (e1 * y + e3 * s3 + e4 * s4 + e5 * s5 + e6 * s6 + e7 * y_new);
        const double sc_psi = tol * (1.0 + std::max(std::abs(y), std::abs(y_new)));
        const double sc_phi = tol * (1.0 + std::max(std::abs(q), std::abs(q + dq)));
        const double err =
            std::max(std::abs(err_psi) / sc_psi, std::abs(err_phi) / sc_phi);

        if (err <= 1.0 && std::isfinite(y_new)) {
            tc += h;
            y = y_new;
            q += dq;
            k1 = k7;
            if (std::abs(y) > blowup) {
                out.t_star = pole_time(tc, y);
                break;
            }
        }
        double factor = 0.2;
        if (std::isfinite(err)) factor = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        h *= std::clamp(factor, 0.2, 5.0);
    }

    out.psi = y;
    out.phi = q;
    return out;
}

double mean_v(const CirParams& params, double t) {
    return params.v * std::exp(-params.b * t) + params.a * t * em1(params.b * t);
}

double mean_i(const CirParams& params, double t) {
    return params.v * t * em1(params.b * t) + params.a * t * t * em2(params.b * t);
}

double var_v(const CirParams& params, double t) {
    const double s2 = params.sigma * params.sigma;
    const double e = std::exp(-params.b * t);
    const double m = t * em1(params.b * t);
    return params.v * s2 * e * m + 0.5 * params.a * s2 * m * m;
}

}  // namespace tailwedge::cir
