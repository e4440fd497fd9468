#pragma once

#include <algorithm>
#include <string>
#include <thread>
#include <vector>

#include "waldenfels/problem.hpp"
#include "waldenfels/rng.hpp"

namespace waldenfels {

/// Euler-Maruyama configuration for dX = b(X) dt + dW 1_{diffusion} + dL.
struct PathConfig {
    double dt = 1e-3;
    double horizon = 100.0;
    long paths = 10000;
    std::uint64_t seed = 0;
    bool diffusion = true;
    int threads = 1;

    void validate() const {
        if (!(dt > 0)) throw config_error("path dt must be > 0");
        if (!(horizon > 0)) throw config_error("path horizon must be > 0");
        if (paths < 100) throw config_error("path count must be >= 100");
    }
};

struct EstimateWithError {
    double estimate = 0;
    double stderr_ = 0;
    long n = 0;
    double censored_fraction = 0;
    bool censored_flag = false;  // censoring >= 1%: error bars widened
    std::string bias_note;
    std::uint64_t seed = 0;
};

struct ExitSample {
    double time = 0;
    Vec position{0, 0};
    bool censored = false;
};

namespace detail {

/// Per-step jump machinery shared by all estimators.
struct JumpSampler {
    const LevyKernel* kernel = nullptr;
    int dim = 1;
    double dt = 0;
    Vec comp_drift{0, 0};  // finite measures: compensator drift of small atoms

    JumpSampler(const std::optional<LevyKernel>& k, int d, double step) : dim(d), dt(step) {
        if (!k) return;
        kernel = &*k;
        if (kernel->state_dependent())
            throw std::domain_error("state-dependent kernels are unsupported in simulation");
        if (kernel->kind() == LevyKernel::Kind::Tabulated)
            throw std::domain_error("tabulated densities are not samplable");
        if (kernel->kind() == LevyKernel::Kind::Finite)
            for (const auto& j : kernel->jumps())
                if (kernel->support_contains(j.z) && norm(j.z, dim) < 1.0)
                    for (int d2 = 0; d2 < dim; ++d2) comp_drift[d2] -= j.mass * j.z[d2];
    }

    void add_increment(Vec& x, CounterRng& rng) const {
        if (!kernel) return;
        if (kernel->kind() == LevyKernel::Kind::AlphaStable) {
            const Vec inc = sample_stable_increment(kernel->alpha(), dt, dim, rng);
            for (int j = 0; j < dim; ++j) x[j] += inc[j];
            return;
        }
        // compound Poisson per atom + compensator drift
        for (int j = 0; j < dim; ++j) x[j] += comp_drift[j] * dt;
        for (const auto& a : kernel->jumps()) {
            if (a.mass == 0 || !kernel->support_contains(a.z)) continue;
            const double lambda = a.mass * dt;
            // Knuth sampling; lambda is tiny for any sane step size
            double L = std::exp(-lambda), p = rng.uniform01();
            int k = 0;
            while (p > L) {
                p *= rng.uniform01();
                ++k;
            }
            for (int j = 0; j < dim; ++j) x[j] += k * a.z[j];
        }
    }
};

template <typename Fn>
void parallel_paths(long paths, int threads, Fn&& body) {
    const int nt = std::max(1, std::min<int>(threads, 64));
    if (nt == 1) {
        for (long p = 0; p < paths; ++p) body(p);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<long> next{0};
    const long chunk = std::max(1L, paths / (nt * 16));
    for (int t = 0; t < nt; ++t)
        pool.emplace_back([&] {
            for (;;) {
                const long beg = next.fetch_add(chunk);
                if (beg >= paths) return;
                const long end = std::min(paths, beg + chunk);
                for (long p = beg; p < end; ++p) body(p);
            }
        });
    for (auto& th : pool) th.join();
}

inline std::pair<double, double> mean_and_se(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    const double mean = pairwise_sum(v) / n;
    std::vector<double> sq(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - mean) * (v[i] - mean);
    const double var = pairwise_sum(sq) / (n - 1);
    return {mean, std::sqrt(var / n)};
}

}  // namespace detail

/// Simulates one path until it first leaves the open set D; exits by jump land
/// strictly outside with the overshoot kept. Paths reaching the horizon are
/// censored (data, not an error).
inline ExitSample simulate_until_exit(const ProblemSpec& spec, const Vec& x0,
                                      const PathConfig& cfg, CounterRng& rng) {
    const int dim = spec.domain->grid.dim;
    const Region& D = spec.domain->region_d;
    if (!D.contains(x0, dim))
        throw config_error("simulation start point lies outside D");
    detail::JumpSampler jumps(spec.kernel, dim, cfg.dt);
    const double sq = std::sqrt(cfg.dt);
    const long nmax = static_cast<long>(cfg.horizon / cfg.dt);
    Vec x = x0;
    for (long n = 1; n <= nmax; ++n) {
        const Vec b = spec.coeffs.eval_b(x);
        for (int j = 0; j < dim; ++j) x[j] += b[j] * cfg.dt;
        if (cfg.diffusion)
            for (int j = 0; j < dim; ++j) x[j] += sq * rng.normal();
        jumps.add_increment(x, rng);
        if (!D.contains(x, dim)) return {n * cfg.dt, x, false};
    }
    return {cfg.horizon, x, true};
}

/// Sample mean and standard error of the exit time. Censored paths enter at
/// the horizon value; above 1% censoring the error bar is widened by
/// censored_fraction * horizon and the flag is set.
inline EstimateWithError estimate_exit_time(const ProblemSpec& spec, const Vec& x0,
                                            const PathConfig& cfg) {
    cfg.validate();
    std::vector<double> times(cfg.paths);
    std::vector<unsigned char> cens(cfg.paths, 0);
    detail::parallel_paths(cfg.paths, cfg.threads, [&](long p) {
        CounterRng rng(cfg.seed, static_cast<std::uint64_t>(p));
        const ExitSample s = simulate_until_exit(spec, x0, cfg, rng);
        times[p] = s.time;
        cens[p] = s.censored ? 1 : 0;
    });
    EstimateWithError est;
    est.seed = cfg.seed;
    est.n = cfg.paths;
    long ncens = 0;
    for (auto c : cens) ncens += c;
    est.censored_fraction = static_cast<double>(ncens) / cfg.paths;
    auto [mean, se] = detail::mean_and_se(times);
    est.estimate = mean;
    est.stderr_ = se;
    est.bias_note = "exit detected at step boundaries: O(sqrt(dt)) late-detection bias";
    if (est.censored_fraction >= 0.01) {
        est.censored_flag = true;
        est.stderr_ += est.censored_fraction * cfg.horizon;
        est.bias_note += "; censoring >= 1%, error bars widened";
    }
    return est;
}

/// Fraction of paths whose exit position lands in the target set U, with the
/// binomial standard error. Censored paths are excluded from the fraction.
inline EstimateWithError estimate_escape_probability(const ProblemSpec& spec, const Vec& x0,
                                                     const Region& U, const PathConfig& cfg) {
    cfg.validate();
    const int dim = spec.domain->grid.dim;
    std::vector<double> hit(cfg.paths, 0.0);
    std::vector<unsigned char> cens(cfg.paths, 0);
    detail::parallel_paths(cfg.paths, cfg.threads, [&](long p) {
        CounterRng rng(cfg.seed, static_cast<std::uint64_t>(p));
        const ExitSample s = simulate_until_exit(spec, x0, cfg, rng);
        cens[p] = s.censored ? 1 : 0;
        hit[p] = (!s.censored && U.contains(s.position, dim)) ? 1.0 : 0.0;
    });
    EstimateWithError est;
    est.seed = cfg.seed;
    long ncens = 0;
    for (auto c : cens) ncens += c;
    est.censored_fraction = static_cast<double>(ncens) / cfg.paths;
    const long neff = cfg.paths - ncens;
    est.n = neff;
    const double phat = neff ? pairwise_sum(hit) / neff : 0.0;
    est.estimate = phat;
    est.stderr_ = neff ? std::sqrt(std::max(0.0, phat * (1 - phat)) / neff) : 0.0;
    if (est.censored_fraction >= 0.01) {
        est.censored_flag = true;
        est.stderr_ += est.censored_fraction;
        est.bias_note = "censoring >= 1%, error bars widened";
    }
    return est;
}

/// Normalized histogram of paths still inside D at time t (absorbing
/// truncation: exited paths are dropped, so total mass is the survivor
/// fraction). Bins tile the bounding box of D.
struct Histogram {
    int dim = 1;
    Vec lo{0, 0};
    double bin_width = 0;
    std::array<int, 2> bins{0, 1};
    std::vector<double> density;  // mass / (paths * bin volume)
    long surviving = 0;
    long total_paths = 0;

    double mass() const {
        double cell = bin_width;
        if (dim == 2) cell *= bin_width;
        double s = 0;
        for (double d : density) s += d;
        return s * cell;
    }
};

inline Histogram density_histogram(const ProblemSpec& spec, const Vec& x0, double t,
                                   const PathConfig& cfg, int nbins) {
    cfg.validate();
    if (!(t <= cfg.horizon)) throw config_error("histogram time exceeds the path horizon");
    const int dim = spec.domain->grid.dim;
    const Region& D = spec.domain->region_d;
    Vec blo, bhi;
    D.bounding_box(dim, blo, bhi);
    if (!std::isfinite(blo[0]) || !std::isfinite(bhi[0]))
        throw config_error("histogram requires a bounded D");
    Histogram h;
    h.dim = dim;
    h.lo = blo;
    h.bin_width = (bhi[0] - blo[0]) / nbins;
    h.bins = {nbins, dim == 2 ? nbins : 1};
    h.density.assign(h.bins[0] * h.bins[1], 0.0);
    h.total_paths = cfg.paths;

    const long steps = std::max(1L, std::lround(t / cfg.dt));
    detail::JumpSampler jumps(spec.kernel, dim, cfg.dt);
    const double sq = std::sqrt(cfg.dt);
    std::vector<Vec> finals(cfg.paths);
    std::vector<unsigned char> alive(cfg.paths, 0);
    detail::parallel_paths(cfg.paths, cfg.threads, [&](long p) {
        CounterRng rng(cfg.seed, static_cast<std::uint64_t>(p));
        Vec x = x0;
        bool in = true;
        for (long n = 1; n <= steps && in; ++n) {
            const Vec b = spec.coeffs.eval_b(x);
            for (int j = 0; j < dim; ++j) x[j] += b[j] * cfg.dt;
            if (cfg.diffusion)
                for (int j = 0; j < dim; ++j) x[j] += sq * rng.normal();
            jumps.add_increment(x, rng);
            in = D.contains(x, dim);
        }
        finals[p] = x;
        alive[p] = in ? 1 : 0;
    });
    double cell = h.bin_width;
    if (dim == 2) cell *= h.bin_width;
    for (long p = 0; p < cfg.paths; ++p) {
        if (!alive[p]) continue;
        ++h.surviving;
        const int ix = std::min(h.bins[0] - 1,
                                std::max(0, static_cast<int>((finals[p][0] - blo[0]) / h.bin_width)));
        int iy = 0;
        if (dim == 2)
            iy = std::min(h.bins[1] - 1,
                          std::max(0, static_cast<int>((finals[p][1] - blo[1]) / h.bin_width)));
        h.density[iy * h.bins[0] + ix] += 1.0;
    }
    for (double& d : h.density) d /= cfg.paths * cell;
    return h;
}

}  // namespace waldenfels
