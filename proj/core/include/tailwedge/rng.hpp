#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace tailwedge::rng {

// Philox4x32-10 counter-based generator (Salmon, Moraes, Dror, Shaw,
// "Parallel random numbers: as easy as 1, 2, 3", SC'11). A block is a pure
// function of (counter, key), so streams keyed by (seed, path index) are
// identical under any parallel schedule.
struct Philox4x32 {
    static constexpr std::uint32_t kMulA = 0xD2511F53u;
    static constexpr std::uint32_t kMulB = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeylA = 0x9E3779B9u;
    static constexpr std::uint32_t kWeylB = 0xBB67AE85u;

    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t prod0 = static_cast<std::uint64_t>(kMulA) * ctr[0];
            const std::uint64_t prod1 = static_cast<std::uint64_t>(kMulB) * ctr[2];
            const std::uint32_t hi0 = static_cast<std::uint32_t>(prod0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(prod0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(prod1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(prod1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += kWeylA;
            key[1] += kWeylB;
        }
        return ctr;
    }
};

// Per-path random stream: key = seed, counter = (path index, block index).
// Draw methods consume 64-bit words; rejection loops are confined to the
// path's own stream, so path i's draws never depend on scheduling.
class PathRng {
public:
    PathRng(std::uint64_t seed, std::uint64_t path_index)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          path_lo_(static_cast<std::uint32_t>(path_index)),
          path_hi_(static_cast<std::uint32_t>(path_index >> 32)) {}

    std::uint64_t next_u64() {
        if (have_word_) {
            have_word_ = false;
            return spare_word_;
        }
        const auto out = Philox4x32::block(
            {path_lo_, path_hi_, static_cast<std::uint32_t>(block_),
             static_cast<std::uint32_t>(block_ >> 32)},
            key_);
        ++block_;
        spare_word_ = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
        have_word_ = true;
        return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    }

    // Uniform on (0, 1), never exactly 0 or 1.
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
    }

    // Standard normal via Box-Muller; generates in pairs.
    double normal() {
        if (have_normal_) {
            have_normal_ = false;
            return spare_normal_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_normal_ = r * std::sin(a);
        have_normal_ = true;
        return r * std::cos(a);
    }

    // Gamma(shape, 1) via Marsaglia-Tsang; shape < 1 through the boost
    // Gamma(shape) = Gamma(shape + 1) * U^{1/shape}. shape = 0 gives 0.
    double gamma(double shape) {
        if (shape == 0.0) return 0.0;
        if (shape < 1.0) {
            const double u = uniform();
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / (3.0 * std::sqrt(d));
        while (true) {
            double x, w;
            do {
                x = normal();
                w = 1.0 + c * x;
            } while (w <= 0.0);
            w = w * w * w;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * w;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - w + std::log(w))) return d * w;
        }
    }

    double chi_square(double dof) { return 2.0 * gamma(0.5 * dof); }

    // Poisson(mean): Knuth product-of-uniforms below 10, Hormann's PTRS
    // transformed rejection above (exact for all means).
    std::uint64_t poisson(double mean) {
        if (mean <= 0.0) return 0;
        if (mean < 10.0) {
            const double limit = std::exp(-mean);
            std::uint64_t k = 0;
            double prod = uniform();
            while (prod > limit) {
                ++k;
                prod *= uniform();
            }
            return k;
        }
        const double slam = std::sqrt(mean);
        const double loglam = std::log(mean);
        const double b = 0.931 + 2.53 * slam;
        const double a = -0.059 + 0.02483 * b;
        const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        const double v_r = 0.9277 - 3.6224 / (b - 2.0);
        while (true) {
            const double u = uniform() - 0.5;
            const double v = uniform();
            const double us = 0.5 - std::abs(u);
            const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
            if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(kf);
            if (kf < 0.0 || (us < 0.013 && v > us)) continue;
            if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
                kf * loglam - mean - lgamma_pos(kf + 1.0))
                return static_cast<std::uint64_t>(kf);
        }
    }

private:
    // ln Gamma(x) for x > 0 without the signgam data race of std::lgamma.
    static double lgamma_pos(double x) {
        // Lanczos (g = 5, n = 6), |rel err| < 2e-10; ample for rejection tests.
        static constexpr double kCoef[6] = {76.18009172947146,    -86.50532032941677,
                                            24.01409824083091,    -1.231739572450155,
                                            0.1208650973866179e-2, -0.5395239384953e-5};
        const double t = x + 5.5 - (x + 0.5) * std::log(x + 5.5);
        double ser = 1.000000000190015;
        for (int i = 0; i < 6; ++i) ser += kCoef[i] / (x + 1.0 + i);
        return -t + std::log(2.5066282746310005 * ser / x);
    }

    std::array<std::uint32_t, 2> key_;
    std::uint32_t path_lo_;
    std::uint32_t path_hi_;
    std::uint64_t block_ = 0;
    std::uint64_t spare_word_ = 0;
    bool have_word_ = false;
    double spare_normal_ = 0.0;
    bool have_normal_ = false;
};

}  // namespace tailwedge::rng
