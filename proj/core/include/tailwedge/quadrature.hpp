#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "tailwedge/errors.hpp"

namespace tailwedge {

// Adaptive Gauss-Kronrod (G7,K15) quadrature on a finite interval.
// Segments are bisected worst-error-first until the summed error estimate
// drops below max(abs_tol, rel_tol * |integral|), or the segment cap is hit.
class AdaptiveGaussKronrod {
public:
    AdaptiveGaussKronrod(double abs_tol, double rel_tol, std::size_t max_segments = 512)
        : abs_tol_(abs_tol), rel_tol_(rel_tol), max_segments_(max_segments) {}

    double integrate(const std::function<double(double)>& f, double a, double b) const {
        std::vector<Segment> segs;
        segs.push_back(rule(f, a, b));
        while (true) {
            double total = 0.0, err = 0.0;
            std::size_t worst = 0;
            for (std::size_t i = 0; i < segs.size(); ++i) {
                total += segs[i].integral;
                err += segs[i].error;
                if (segs[i].error > segs[worst].error) worst = i;
            }
            if (err <= std::max(abs_tol_, rel_tol_ * std::abs(total))) return total;
            if (segs.size() >= max_segments_)
                throw QuadratureError("quadrature-failure: segment cap reached");
            const Segment s = segs[worst];
            const double mid = 0.5 * (s.a + s.b);
            segs[worst] = rule(f, s.a, mid);
            segs.push_back(rule(f, mid, s.b));
        }
    }

private:
    struct Segment {
        double a, b, integral, error;
    };

    Segment rule(const std::function<double(double)>& f, double a, double b) const {
        // QUADPACK dqk15 nodes/weights (Fullerton, 80-digit arithmetic).
        static constexpr double xgk[8] = {
            0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
            0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
            0.207784955007898467600689403773245, 0.0};
        static constexpr double wgk[8] = {
            0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
        static constexpr double wg[4] = {
            0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
            0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

        const double c = 0.5 * (a + b);
        const double h = 0.5 * (b - a);
        const double fc = f(c);
        double resg = fc * wg[3];
        double resk = fc * wgk[7];
        for (int j = 0; j < 7; ++j) {
            const double x = h * xgk[j];
            const double fsum = f(c - x) + f(c + x);
            resk += wgk[j] * fsum;
            if (j % 2 == 1) resg += wg[j / 2] * fsum;
        }
        return Segment{a, b, resk * h, std::abs((resk - resg) * h)};
    }

    double abs_tol_;
    double rel_tol_;
    std::size_t max_segments_;
};

}  // namespace tailwedge
