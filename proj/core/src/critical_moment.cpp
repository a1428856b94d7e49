#include "tailwedge/critical_moment.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "tailwedge/diagnostics.hpp"
#include "tailwedge/errors.hpp"

namespace tailwedge::cir {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Householder QR least squares for a tall m x N system. Columns are scaled
// to unit norm first so the condition check measures the basis geometry, not
// the (wild) column magnitudes. Throws when the scaled R diagonal ratio
// signals a condition number beyond 1e12.
template <std::size_t N>
std::array<double, N> solve_ls(std::vector<std::array<double, N>> A, std::vector<double> y,
                               double* max_resid) {
    const std::size_t m = A.size();
    const auto A0 = A;
    const auto y0 = y;

    std::array<double, N> scale{};
    for (std::size_t j = 0; j < N; ++j) {
        double norm = 0.0;
        for (std::size_t i = 0; i < m; ++i) norm += A[i][j] * A[i][j];
        norm = std::sqrt(norm);
        if (norm == 0.0) throw FitConditionError("fit-ill-conditioned: zero column");
        scale[j] = norm;
        for (std::size_t i = 0; i < m; ++i) A[i][j] /= norm;
    }

    for (std::size_t col = 0; col < N; ++col) {
        double norm = 0.0;
        for (std::size_t i = col; i < m; ++i) norm += A[i][col] * A[i][col];
        norm = std::sqrt(norm);
        const double head = A[col][col];
        const double alpha = head >= 0.0 ? -norm : norm;
        std::vector<double> u(m, 0.0);
        u[col] = head - alpha;
        for (std::size_t i = col + 1; i < m; ++i) u[i] = A[i][col];
        double unorm2 = 0.0;
        for (std::size_t i = col; i < m; ++i) unorm2 += u[i] * u[i];
        if (unorm2 > 0.0) {
            for (std::size_t j = col; j < N; ++j) {
                double dot = 0.0;
                for (std::size_t i = col; i < m; ++i) dot += u[i] * A[i][j];
                const double f = 2.0 * dot / unorm2;
                for (std::size_t i = col; i < m; ++i) A[i][j] -= f * u[i];
            }
            double dot = 0.0;
            for (std::size_t i = col; i < m; ++i) dot += u[i] * y[i];
            const double f = 2.0 * dot / unorm2;
            for (std::size_t i = col; i < m; ++i) y[i] -= f * u[i];
        }
    }
    double rmax = 0.0, rmin = kInf;
    for (std::size_t i = 0; i < N; ++i) {
        rmax = std::max(rmax, std::abs(A[i][i]));
        rmin = std::min(rmin, std::abs(A[i][i]));
    }
    if (!(rmin > 0.0) || rmax / rmin > 1e12)
        throw FitConditionError("fit-ill-conditioned: design matrix condition > 1e12");

    std::array<double, N> x{};
    for (std::size_t ri = N; ri-- > 0;) {
        double s = y[ri];
        for (std::size_t j = ri + 1; j < N; ++j) s -= A[ri][j] * x[j];
        x[ri] = s / A[ri][ri];
    }
    for (std::size_t j = 0; j < N; ++j) x[j] /= scale[j];

    if (max_resid) {
        double worst = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double fit = 0.0;
            for (std::size_t j = 0; j < N; ++j) fit += A0[i][j] * x[j];
            worst = std::max(worst, std::abs(fit - y0[i]));
        }
        *max_resid = worst;
    }
    return x;
}

SuperpositionSpec flipped(const SuperpositionSpec& spec) {
    return SuperpositionSpec{-spec.l1, -spec.l2, spec.t};
}

double explosion_time_scaled(const CirParams& params, const SuperpositionSpec& spec,
                             double mu) {
    return t_star(params, mu * spec.l1, mu * spec.l2);
}

}  // namespace

double mu_plus(const CirParams& params, const SuperpositionSpec& spec) {
    params.validate();
    if (!(spec.t > 0.0)) throw PreconditionError("critical-moment: require t > 0");
    if (!(std::max(spec.l1, spec.l2) > 0.0))
        throw PreconditionError("precondition-violated: require max(l1, l2) > 0");

    // t*(mu) decreases from +inf (mu -> 0) to 0 (mu -> inf) on this branch.
    double hi = 1.0;
    int doublings = 0;
    while (explosion_time_scaled(params, spec, hi) > spec.t) {
        hi *= 2.0;
        if (++doublings > 60) throw NoConvergenceError("no-bracket: scan cap 2^60 reached");
    }
    double lo = hi * 0.5;
    while (explosion_time_scaled(params, spec, lo) <= spec.t) {
        lo *= 0.5;
        if (lo < 1e-290) throw NoConvergenceError("no-bracket: lower scan collapsed");
    }
    for (int it = 0; it < 200 && (hi - lo) > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (explosion_time_scaled(params, spec, mid) > spec.t ? lo : hi) = mid;
    }
    const double root = 0.5 * (lo + hi);

    // Guard the monotonicity assumption behind the bisection.
    const double eps = 1e-6 * root;
    const double t_left = explosion_time_scaled(params, spec, root - eps);
    const double t_right = explosion_time_scaled(params, spec, root + eps);
    if (!(t_left > t_right))
        diag::warn("critical-moment: t*(mu) not locally decreasing at the root");
    return root;
}

double mu_minus(const CirParams& params, const SuperpositionSpec& spec) {
    if (!(std::min(spec.l1, spec.l2) < 0.0))
        throw PreconditionError("precondition-violated: require min(l1, l2) < 0");
    return mu_plus(params, flipped(spec));
}

OmegaClosed omega_closed(const CirParams& params, const SuperpositionSpec& spec, Side side) {
    const SuperpositionSpec s = side == Side::plus ? spec : flipped(spec);
    const double mu = mu_plus(params, s);
    if (std::isinf(mu)) throw PreconditionError("infinite-critical-moment");

    const double sig2 = params.sigma * params.sigma;
    const double l1 = mu * s.l1, l2 = mu * s.l2;
    const RiccatiCase rc = classify(params, l1, l2);
    OmegaClosed out;
    out.log_coeff = 2.0 * params.a / sig2;

    if (rc.tag == RiccatiRegime::Supercritical) {
        // omega = v sqrt(2 mu l2 s^2 - b^2) / (s^2 dg/dmu) with
        // g(t, mu) = sqrt(2 mu l2 s^2 - b^2)/2 t + atan((mu l1 s^2 - b)/sqrt(...)).
        const double D = 2.0 * mu * s.l2 * sig2 - params.b * params.b;
        const double rt = std::sqrt(D);
        const double N = mu * s.l1 * sig2 - params.b;
        const double dD = 2.0 * s.l2 * sig2;
        const double drt = 0.5 * dD / rt;
        const double dN = s.l1 * sig2;
        const double dg = 0.5 * s.t * drt + (dN * rt - N * drt) / (rt * rt + N * N);
        if (!(dg > 0.0))
            throw NoConvergenceError("omega-closed: dg/dmu <= 0 at the critical moment");
        out.omega = params.v * rt / (sig2 * dg);
        return out;
    }
    if (rc.tag == RiccatiRegime::SubcriticalOutside) {
        // F(eps) = C(eps) e^{alpha(eps) s^2 t} = 1 - c1 eps + O(eps^2) and
        // omega = 2 v alpha(0) / c1, both by analytic differentiation at eps = 0.
        const double alpha0 = rc.alpha_or_beta;
        const double lbar = l1 - params.b / sig2;
        const double dlbar = -s.l1;                       // d lbar / d eps
        const double dalpha = s.l2 / (alpha0 * sig2);     // d alpha / d eps
        const double C0 = (lbar - alpha0) / (lbar + alpha0);
        const double dC = 2.0 * (alpha0 * dlbar - lbar * dalpha) /
                          ((lbar + alpha0) * (lbar + alpha0));
        const double c1 = -(dC / C0 + sig2 * s.t * dalpha);
        if (!(c1 > 0.0))
            throw NoConvergenceError("omega-closed: degenerate Taylor coefficient");
        out.omega = 2.0 * params.v * alpha0 / c1;
        return out;
    }
    throw NumericError(
        "omega-closed: critical moment sits on the case boundary; use omega_fit");
}

OmegaFit omega_fit(const CirParams& params, const SuperpositionSpec& spec, Side side) {
    const SuperpositionSpec s = side == Side::plus ? spec : flipped(spec);
    const double mu = mu_plus(params, s);
    if (std::isinf(mu)) throw PreconditionError("infinite-critical-moment");

    // Lambda(mu - eps) = omega/eps + kappa ln(1/eps) + const + O(eps) over the
    // grid eps = mu * 10^{-2, -2.5, ..., -6}; below 1e-6 the closed forms run
    // into cos-zero / expm1 cancellation. The linear column soaks up the
    // leading analytic remainder, which would otherwise bias kappa at the
    // coarse end of the grid.
    std::vector<std::array<double, 4>> A;
    std::vector<double> y;
    for (int i = 0; i < 9; ++i) {
        const double expo = -2.0 - 0.5 * static_cast<double>(i);
        const double eps = mu * std::pow(10.0, expo);
        const double m = mu - eps;
        A.push_back({1.0 / eps, std::log(1.0 / eps), 1.0, eps});
        y.push_back(log_mgf(params, m * s.l1, m * s.l2, s.t));
    }
    OmegaFit fit;
    double resid = 0.0;
    const std::array<double, 4> x = solve_ls<4>(std::move(A), std::move(y), &resid);
    fit.omega = x[0];
    fit.log_coeff = x[1];
    fit.constant = x[2];
    fit.max_residual = resid;
    return fit;
}

CorollaryBand corollary_band(const CirParams& params, const SuperpositionSpec& spec,
                             double R) {
    if (!(R > 0.0)) throw PreconditionError("corollary-band: require R > 0");
    const double mu = mu_plus(params, spec);
    const double omega = omega_fit(params, spec, Side::plus).omega;
    const double c_hi = params.a / (params.sigma * params.sigma);
    CorollaryBand band;
    band.R = R;
    band.center = -mu * R + 2.0 * std::sqrt(omega * R);
    band.c_interval = {c_hi - 0.75, c_hi};
    return band;
}

CriticalMomentResult critical_moments(const CirParams& params, const SuperpositionSpec& spec) {
    CriticalMomentResult out;
    if (std::max(spec.l1, spec.l2) > 0.0) {
        out.mu_plus = mu_plus(params, spec);
        out.plus = omega_fit(params, spec, Side::plus);
    } else {
        out.mu_plus = kInf;
    }
    if (std::min(spec.l1, spec.l2) < 0.0) {
        out.mu_minus = mu_minus(params, spec);
        out.minus = omega_fit(params, spec, Side::minus);
    } else {
        out.mu_minus = kInf;
    }
    return out;
}

MgfModel mgf_model(const CirParams& params, const SuperpositionSpec& spec) {
    const double mu = mu_plus(params, spec);
    MgfModel model;
    model.mu_star = mu;
    model.log_mgf = [params, spec, mu](double p) {
        if (!(p < mu)) throw MomentExplodedError("moment-exploded: p >= mu_star", mu);
        if (p == 0.0) return 0.0;
        return log_mgf(params, p * spec.l1, p * spec.l2, spec.t);
    };
    model.alpha = 1.0;
    model.mean = spec.l1 * mean_v(params, spec.t) + spec.l2 * mean_i(params, spec.t);
    return model;
}

}  // namespace tailwedge::cir
