#include "tailwedge/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <string>
#include <thread>
#include <tuple>

#include "tailwedge/diagnostics.hpp"
#include "tailwedge/errors.hpp"

namespace tailwedge::mc {

namespace {

constexpr std::uint64_t kChunk = 8192;  // fixed partition, independent of workers

std::uint32_t resolve_workers(std::uint32_t requested) {
    if (requested > 0) return requested;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? hc : 1;
}

// Runs `body(chunk_index, path_begin, path_end)` over the fixed chunk grid on
// a small pool. Chunk results must be written to per-chunk slots; the caller
// reduces them in chunk order so totals do not depend on the worker count.
void for_each_chunk(std::uint64_t n_paths, std::uint32_t workers,
                    const std::function<void(std::size_t, std::uint64_t, std::uint64_t)>& body) {
    const std::size_t n_chunks =
        static_cast<std::size_t>((n_paths + kChunk - 1) / kChunk);
    std::atomic<std::size_t> next{0};
    auto drain = [&] {
        while (true) {
            const std::size_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            const std::uint64_t begin = static_cast<std::uint64_t>(c) * kChunk;
            const std::uint64_t end = std::min(begin + kChunk, n_paths);
            body(c, begin, end);
        }
    };
    const std::uint32_t n_workers =
        static_cast<std::uint32_t>(std::min<std::size_t>(resolve_workers(workers), n_chunks));
    if (n_workers <= 1) {
        drain();
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (std::uint32_t w = 0; w < n_workers; ++w) pool.emplace_back(drain);
    for (auto& th : pool) th.join();
}

}  // namespace

void McConfig::validate() const {
    if (n_paths < 100) throw ArgumentError("mc: require n_paths >= 100");
    if (n_steps < 8) throw ArgumentError("mc: require n_steps >= 8");
}

double sample_transition(const cir::CirParams& params, double v_from, double dt,
                         rng::PathRng& rng) {
    if (!(dt > 0.0)) throw ArgumentError("invalid-dt: require dt > 0");
    const double s2 = params.sigma * params.sigma;
    const double decay = std::exp(-params.b * dt);
    const double cbar = params.b == 0.0
                            ? 0.25 * s2 * dt
                            : s2 * (-std::expm1(-params.b * dt)) / (4.0 * params.b);
    const double dof = 4.0 * params.a / s2;
    const double ncp = v_from * decay / cbar;

    if (dof > 1.0) {
        const double z = rng.normal() + std::sqrt(ncp);
        return cbar * (z * z + rng.chi_square(dof - 1.0));
    }
    const std::uint64_t n = rng.poisson(0.5 * ncp);
    return cbar * rng.chi_square(dof + 2.0 * static_cast<double>(n));
}

std::pair<double, double> simulate_path(const cir::CirParams& params, double t,
                                        std::uint32_t n_steps, rng::PathRng& rng) {
    if (!(t > 0.0)) throw ArgumentError("mc: require t > 0");
    const double dt = t / static_cast<double>(n_steps);
    double v = params.v;
    double integral = 0.5 * v;
    for (std::uint32_t s = 0; s + 1 < n_steps; ++s) {
        v = sample_transition(params, v, dt, rng);
        integral += v;
    }
    v = sample_transition(params, v, dt, rng);
    integral = (integral + 0.5 * v) * dt;
    return {v, integral};
}

std::pair<double, double> wilson_interval(std::uint64_t k, std::uint64_t n) {
    const double nd = static_cast<double>(n);
    if (k == 0) return {0.0, 3.0 / nd};
    if (k == n) return {1.0 - 3.0 / nd, 1.0};
    constexpr double z = 1.959963984540054;  // Phi^{-1}(0.975)
    const double p = static_cast<double>(k) / nd;
    const double z2n = z * z / nd;
    const double denom = 1.0 + z2n;
    const double center = (p + 0.5 * z2n) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nd + 0.25 * z2n / nd) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

std::vector<McTailEstimate> estimate_tail(const cir::CirParams& params,
                                          const cir::SuperpositionSpec& spec,
                                          const std::vector<double>& R_list,
                                          const McConfig& config) {
    params.validate();
    config.validate();
    if (R_list.empty()) throw ArgumentError("mc: R_list must be nonempty");

    const std::size_t n_r = R_list.size();
    const std::size_t n_chunks =
        static_cast<std::size_t>((config.n_paths + kChunk - 1) / kChunk);
    // Exceedance counts are integers, so any reduction order gives the same
    // totals; per-chunk slots still keep the sweep replayable.
    std::vector<std::vector<std::uint64_t>> counts(n_chunks,
                                                   std::vector<std::uint64_t>(n_r, 0));

    for_each_chunk(config.n_paths, config.workers,
                   [&](std::size_t c, std::uint64_t begin, std::uint64_t end) {
                       auto& slot = counts[c];
                       for (std::uint64_t i = begin; i < end; ++i) {
                           rng::PathRng rng(config.seed, i);
                           const auto [v, integral] =
                               simulate_path(params, spec.t, config.n_steps, rng);
                           const double z = spec.l1 * v + spec.l2 * integral;
                           for (std::size_t r = 0; r < n_r; ++r)
                               if (z > R_list[r]) ++slot[r];
                       }
                   });

    std::vector<McTailEstimate> out(n_r);
    for (std::size_t r = 0; r < n_r; ++r) {
        std::uint64_t k = 0;
        for (const auto& slot : counts) k += slot[r];
        auto& est = out[r];
        est.R = R_list[r];
        est.n_exceed = k;
        est.p_hat = static_cast<double>(k) / static_cast<double>(config.n_paths);
        std::tie(est.ci_low, est.ci_high) = wilson_interval(k, config.n_paths);
        est.config = config;
        if (k == 0)
            diag::warn("zero-exceedance at R=" + std::to_string(R_list[r]) +
                       "; upper bound by the rule of three");
    }
    return out;
}

std::vector<McMgfEstimate> estimate_mgf(const cir::CirParams& params,
                                        const cir::SuperpositionSpec& spec,
                                        const std::vector<double>& p_list,
                                        const McConfig& config) {
    params.validate();
    config.validate();
    if (p_list.empty()) throw ArgumentError("mc: p_list must be nonempty");

    const double mu = cir::mu_plus(params, spec);
    for (double p : p_list) {
        if (p > 0.8 * mu)
            throw PreconditionError("p-too-close-to-critical: require p <= 0.8 * mu_plus");
        if (p > 0.5 * mu)
            diag::warn("heavy-tail-variance: p=" + std::to_string(p) +
                       " beyond 0.5 * mu_plus; standard errors are optimistic");
    }

    const std::size_t n_p = p_list.size();
    const std::size_t n_chunks =
        static_cast<std::size_t>((config.n_paths + kChunk - 1) / kChunk);
    struct Accum {
        std::vector<double> sum, sum_sq;
    };
    std::vector<Accum> partial(n_chunks);

    for_each_chunk(config.n_paths, config.workers,
                   [&](std::size_t c, std::uint64_t begin, std::uint64_t end) {
                       auto& slot = partial[c];
                       slot.sum.assign(n_p, 0.0);
                       slot.sum_sq.assign(n_p, 0.0);
                       for (std::uint64_t i = begin; i < end; ++i) {
                           rng::PathRng rng(config.seed, i);
                           const auto [v, integral] =
                               simulate_path(params, spec.t, config.n_steps, rng);
                           const double z = spec.l1 * v + spec.l2 * integral;
                           for (std::size_t j = 0; j < n_p; ++j) {
                               const double w = std::exp(p_list[j] * z);
                               slot.sum[j] += w;
                               slot.sum_sq[j] += w * w;
                           }
                       }
                   });

    const double n = static_cast<double>(config.n_paths);
    std::vector<McMgfEstimate> out(n_p);
    for (std::size_t j = 0; j < n_p; ++j) {
        // Reduce in chunk order: float sums stay bitwise reproducible.
        double sum = 0.0, sum_sq = 0.0;
        for (const auto& slot : partial) {
            sum += slot.sum[j];
            sum_sq += slot.sum_sq[j];
        }
        const double mean = sum / n;
        const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
        out[j] = McMgfEstimate{p_list[j], mean, std::sqrt(var / n)};
    }
    return out;
}

}  // namespace tailwedge::mc
