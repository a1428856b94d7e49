#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "support/test_oracles.hpp"
#include "tailwedge/cir_riccati.hpp"
#include "tailwedge/errors.hpp"

using namespace tailwedge;
using cir::CirParams;
using cir::RiccatiRegime;

namespace {

constexpr double kPi = std::numbers::pi_v<double>;

struct Config {
    CirParams p;
    double l1, l2;
};

// Stratified random configurations, one batch per regime.
std::vector<Config> random_configs(int per_tag, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    auto unif = [&](double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(gen);
    };
    std::vector<Config> out;
    for (int tag = 0; tag < 4; ++tag) {
        for (int i = 0; i < per_tag; ++i) {
            CirParams p{unif(0.0, 2.0), unif(-1.5, 2.0), unif(0.4, 1.8), unif(0.0, 2.0)};
            const double s2 = p.sigma * p.sigma;
            const double crit = p.b * p.b / (2.0 * s2);
            double l1 = 0.0, l2 = 0.0;
            if (tag == 0 || tag == 1) {
                const double w = unif(0.05, 2.0);
                l2 = crit - w;
                const double alpha = std::sqrt(2.0 * w * s2) / s2;
                if (tag == 0) {
                    const double sign = unif(0.0, 1.0) < 0.6 ? 1.0 : -1.0;
                    l1 = p.b / s2 + sign * alpha * (1.0 + unif(0.05, 1.5));
                } else {
                    l1 = p.b / s2 + alpha * unif(-0.95, 0.95);
                }
            } else if (tag == 2) {
                l2 = crit;
                l1 = unif(-3.0, 3.0);
            } else {
                l2 = crit + unif(0.05, 2.0);
                l1 = unif(-3.0, 3.0);
            }
            out.push_back({p, l1, l2});
        }
    }
    return out;
}

double horizon(const Config& c) {
    const double ts = cir::t_star(c.p, c.l1, c.l2);
    return std::isfinite(ts) ? 0.9 * ts : 2.0;
}

}  // namespace

TEST_CASE("classification by regime") {
    const CirParams p{1.0, 1.0, 1.0, 1.0};

    // lbar = alpha boundary: tabulated as the inside branch, C degenerates to 0.
    auto c = cir::classify(p, 2.0, 0.0);
    CHECK(c.tag == RiccatiRegime::SubcriticalInside);
    CHECK(c.alpha_or_beta == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(*c.C == doctest::Approx(0.0).epsilon(1e-14));

    CHECK(cir::classify(p, 0.7, 0.5).tag == RiccatiRegime::Critical);
    CHECK(cir::classify(p, 5.0, 0.5).tag == RiccatiRegime::Critical);

    const CirParams q{1.0, 0.0, 1.0, 1.0};
    auto s = cir::classify(q, 0.0, 1.0);
    CHECK(s.tag == RiccatiRegime::Supercritical);
    CHECK(s.alpha_or_beta == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(!s.C.has_value());

    CHECK(cir::classify(p, 3.0, 0.1).tag == RiccatiRegime::SubcriticalOutside);
    CHECK(cir::classify(p, 1.1, 0.1).tag == RiccatiRegime::SubcriticalInside);
}

TEST_CASE("psi initial condition is exact") {
    for (const auto& c : random_configs(5, 99)) {
        CHECK(cir::psi(c.p, c.l1, c.l2, 0.0) == c.l1);
        CHECK(cir::phi(c.p, c.l1, c.l2, 0.0) == 0.0);
    }
}

TEST_CASE("critical-case values") {
    const CirParams p{1.0, 1.0, 1.0, 1.0};
    CHECK(cir::psi(p, 2.0, 0.5, 1.0) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(cir::phi(p, 2.0, 0.5, 1.0) ==
          doctest::Approx(1.0 + 2.0 * std::log(2.0)).epsilon(1e-14));
    CHECK(cir::t_star(p, 2.0, 0.5) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("explosion time table values") {
    const CirParams super{1.0, 0.0, 1.0, 1.0};
    CHECK(cir::t_star(super, 0.0, 1.0) ==
          doctest::Approx(kPi / std::sqrt(2.0)).epsilon(1e-14));
    // l1 = b/s^2 + alpha is the non-exploding side of the subcritical split.
    const CirParams p{1.0, 1.0, 1.0, 1.0};
    CHECK(std::isinf(cir::t_star(p, 1.0, 0.0)));
    CHECK(std::isinf(cir::t_star(p, -5.0, 0.3)));
}

TEST_CASE("phi equals the running integral of psi") {
    const std::vector<Config> cases = {
        {{1.0, 1.0, 1.0, 1.0}, 0.3, 0.2},    // subcritical inside
        {{1.0, 1.0, 1.0, 1.0}, 3.0, 0.1},    // subcritical outside, exploding
        {{1.0, 1.5, 0.8, 1.0}, -3.5, 0.2},   // subcritical outside, C > 1
        {{1.0, 1.0, 1.0, 1.0}, 2.0, 0.5},    // critical
        {{1.0, 0.0, 1.0, 1.0}, 0.0, 1.0},    // supercritical
        {{1.0, -0.5, 1.2, 0.7}, 0.4, 0.9},   // negative reversion
    };
    for (const auto& c : cases) {
        const double t = horizon(c);
        const auto psi_of = [&](double s) { return cir::psi(c.p, c.l1, c.l2, s); };
        const double quad = oracles::romberg(psi_of, 0.0, t, 20, 1e-11);
        CHECK(cir::phi(c.p, c.l1, c.l2, t) == doctest::Approx(quad).epsilon(1e-8));
    }
}

TEST_CASE("closed forms satisfy the Riccati equation") {
    for (const auto& c : random_configs(10, 4711)) {
        const double s2 = c.p.sigma * c.p.sigma;
        const double t_hi = horizon(c);
        for (int j = 1; j < 10; ++j) {
            const double t = t_hi * j / 10.0;
            const double h = 1e-5 * t_hi;
            const double pm = cir::psi(c.p, c.l1, c.l2, t - h);
            const double pp = cir::psi(c.p, c.l1, c.l2, t + h);
            const double pc = cir::psi(c.p, c.l1, c.l2, t);
            const double lhs = (pp - pm) / (2.0 * h);
            const double rhs = 0.5 * s2 * pc * pc - c.p.b * pc + c.l2;
            CHECK(std::abs(lhs - rhs) <= 1e-6 * (1.0 + pc * pc));
            const double fm = cir::phi(c.p, c.l1, c.l2, t - h);
            const double fp = cir::phi(c.p, c.l1, c.l2, t + h);
            CHECK(std::abs((fp - fm) / (2.0 * h) - pc) <= 1e-6 * (1.0 + std::abs(pc)));
        }
    }
}

TEST_CASE("closed forms match the reference integrator") {
    for (const auto& c : random_configs(6, 20240809)) {
        const double t_hi = horizon(c);
        for (int j = 1; j <= 10; ++j) {
            const double t = t_hi * j / 10.0;
            const auto cf = cir::evaluate(c.p, c.l1, c.l2, t);
            const auto ode = cir::ode_reference(c.p, c.l1, c.l2, t, 1e-11);
            CHECK(std::abs(cf.psi - ode.psi) <= 1e-8 * (1.0 + std::abs(cf.psi)));
            CHECK(std::abs(cf.phi - ode.phi) <= 1e-8 * (1.0 + std::abs(cf.phi)));
        }
    }
}

TEST_CASE("psi is monotone in l1 and l2") {
    std::mt19937_64 gen(371);
    auto unif = [&](double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(gen);
    };
    for (int i = 0; i < 30; ++i) {
        const CirParams p{unif(0.0, 2.0), unif(-1.0, 1.5), unif(0.5, 1.5), 1.0};
        const double l1 = unif(-1.0, 1.0), l2 = unif(-1.0, 0.5);
        const double d1 = unif(0.0, 0.5), d2 = unif(0.0, 0.5);
        const double ts = std::min(cir::t_star(p, l1, l2), cir::t_star(p, l1 + d1, l2 + d2));
        const double t_hi = std::isfinite(ts) ? 0.9 * ts : 1.5;
        for (int j = 1; j <= 5; ++j) {
            const double t = t_hi * j / 5.0;
            CHECK(cir::psi(p, l1, l2, t) <=
                  cir::psi(p, l1 + d1, l2 + d2, t) + 1e-12);
        }
    }
}

TEST_CASE("psi is continuous across the critical boundary") {
    const CirParams p{1.0, 1.0, 1.0, 1.0};
    const double crit = 0.5;
    for (double l1 : {0.2, 1.3, 2.5}) {
        const double ts = cir::t_star(p, l1, crit);
        const double t = std::isfinite(ts) ? 0.5 * ts : 1.0;
        const double at_crit = cir::psi(p, l1, crit, t);
        CHECK(cir::psi(p, l1, crit - 1e-6, t) == doctest::Approx(at_crit).epsilon(1e-4));
        CHECK(cir::psi(p, l1, crit + 1e-6, t) == doctest::Approx(at_crit).epsilon(1e-4));
    }
}

TEST_CASE("log transform basics") {
    const CirParams p{1.0, 1.0, 1.0, 1.0};
    CHECK(cir::log_mgf(p, 0.0, 0.0, 0.7) == 0.0);
    const CirParams neg_b{1.0, -0.4, 1.0, 1.0};
    CHECK(cir::log_mgf(neg_b, 0.0, 0.0, 0.7) == 0.0);

    // First order in l1: log transform ~ l1 * E[V_t]; v = a/b keeps E[V_t] = v.
    const double eps = 1e-6;
    CHECK(cir::log_mgf(p, eps, 0.0, 0.7) / eps == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("explosion guard throws") {
    const CirParams p{1.0, 1.0, 1.0, 1.0};
    CHECK_THROWS_AS(cir::psi(p, 2.0, 0.5, 2.0), MomentExplodedError);
    CHECK_THROWS_AS(cir::log_mgf(p, 2.0, 0.5, 2.5), MomentExplodedError);
    try {
        cir::phi(p, 2.0, 0.5, 5.0);
        CHECK(false);
    } catch (const MomentExplodedError& e) {
        CHECK(e.t_star() == doctest::Approx(2.0).epsilon(1e-12));
    }
}

TEST_CASE("ode reference: blowup estimates match the table") {
    const CirParams p{1.0, 1.0, 1.0, 1.0};
    const auto run = cir::ode_reference(p, 2.0, 0.5, 4.0, 1e-10);
    CHECK(run.t_star == doctest::Approx(2.0).epsilon(1e-4));

    for (const auto& c : random_configs(5, 555)) {
        const double ts = cir::t_star(c.p, c.l1, c.l2);
        if (!std::isfinite(ts)) continue;
        const auto est = cir::ode_reference(c.p, c.l1, c.l2, 1.3 * ts, 1e-10);
        CHECK(est.t_star == doctest::Approx(ts).epsilon(1e-4));
    }
}

TEST_CASE("ode reference: stationary point stays put") {
    const CirParams p{1.0, 1.0, 1.0, 1.0};
    // alpha = sqrt(b^2 - 2 l2 s^2)/s^2 with l2 = 0.18: l1 = b/s^2 + alpha.
    const double alpha = std::sqrt(1.0 - 2.0 * 0.18);
    const double l1 = 1.0 + alpha;
    const auto run = cir::ode_reference(p, l1, 0.18, 3.0, 1e-11);
    CHECK(run.psi == doctest::Approx(l1).epsilon(1e-12));
    CHECK(run.phi == doctest::Approx(l1 * 3.0).epsilon(1e-12));
    CHECK(cir::psi(p, l1, 0.18, 2.0) == doctest::Approx(l1).epsilon(1e-12));
}

TEST_CASE("moment helpers") {
    const CirParams p{1.0, 1.0, 1.0, 1.0};
    CHECK(cir::mean_v(p, 0.7) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(cir::mean_i(p, 0.7) == doctest::Approx(0.7).epsilon(1e-14));

    // b -> 0 continuity.
    const CirParams b0{0.8, 0.0, 1.1, 0.6};
    const CirParams btiny{0.8, 1e-9, 1.1, 0.6};
    CHECK(cir::mean_v(b0, 1.3) == doctest::Approx(cir::mean_v(btiny, 1.3)).epsilon(1e-7));
    CHECK(cir::mean_i(b0, 1.3) == doctest::Approx(cir::mean_i(btiny, 1.3)).epsilon(1e-7));
    CHECK(cir::var_v(b0, 1.3) == doctest::Approx(cir::var_v(btiny, 1.3)).epsilon(1e-7));
    CHECK(cir::mean_v(b0, 1.3) == doctest::Approx(0.6 + 0.8 * 1.3).epsilon(1e-14));
    CHECK(cir::var_v(b0, 1.3) ==
          doctest::Approx(0.6 * 1.21 * 1.3 + 0.5 * 0.8 * 1.21 * 1.69).epsilon(1e-12));
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(cir::classify(CirParams{1.0, 0.0, 0.0, 1.0}, 0.0, 1.0), ArgumentError);
    CHECK_THROWS_AS(cir::classify(CirParams{-1.0, 0.0, 1.0, 1.0}, 0.0, 1.0), ArgumentError);
    CHECK_THROWS_AS(cir::classify(CirParams{1.0, 0.0, 1.0, -1.0}, 0.0, 1.0), ArgumentError);
}
