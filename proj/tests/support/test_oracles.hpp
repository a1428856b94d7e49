#pragma once

// Test-side reference implementations, kept independent of the library code
// paths they are used to check.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracles {

// Golden-section search for the maximum of a unimodal f on [a, b].
inline double golden_section_max(const std::function<double(double)>& f, double a, double b,
                                 int iters = 200) {
    const double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iters && (b - a) > 1e-14 * (std::abs(a) + std::abs(b)); ++i) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

// Romberg extrapolation of the composite trapezoid rule.
inline double romberg(const std::function<double(double)>& f, double a, double b,
                      int levels = 18, double tol = 1e-10) {
    std::vector<std::vector<double>> r(static_cast<std::size_t>(levels));
    r[0] = {0.5 * (b - a) * (f(a) + f(b))};
    for (int k = 1; k < levels; ++k) {
        const std::size_t n = std::size_t{1} << k;
        const double h = (b - a) / static_cast<double>(n);
        double sum = 0.0;
        for (std::size_t i = 1; i < n; i += 2) sum += f(a + static_cast<double>(i) * h);
        r[static_cast<std::size_t>(k)].resize(static_cast<std::size_t>(k) + 1);
        r[static_cast<std::size_t>(k)][0] = 0.5 * r[static_cast<std::size_t>(k) - 1][0] + h * sum;
        double pow4 = 1.0;
        for (int j = 1; j <= k; ++j) {
            pow4 *= 4.0;
            r[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] =
                (pow4 * r[static_cast<std::size_t>(k)][static_cast<std::size_t>(j) - 1] -
                 r[static_cast<std::size_t>(k) - 1][static_cast<std::size_t>(j) - 1]) /
                (pow4 - 1.0);
        }
        if (k > 3 && std::abs(r[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)] -
                              r[static_cast<std::size_t>(k) - 1][static_cast<std::size_t>(k) - 1]) <
                         tol)
            return r[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)];
    }
    return r[static_cast<std::size_t>(levels) - 1][static_cast<std::size_t>(levels) - 1];
}

// Least-squares slope of y against x.
inline double slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("slope: bad input");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    return sxy / sxx;
}

}  // namespace oracles
