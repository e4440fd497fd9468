#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>

#include "waldenfels/common.hpp"

namespace waldenfels {

/// Counter-based stream (splitmix64) keyed by (seed, stream). Streams indexed
/// by path make every estimate independent of scheduling: the same seed gives
/// bitwise-identical results for any worker count.
class CounterRng {
  public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : state_(mix(seed ^ mix(stream + 0x2545f4914f6cdd1dULL))) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~0ULL; }

    result_type operator()() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
    double uniform_open() {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }
    double exponential() { return -std::log(uniform_open()); }

    double normal() {
        if (spare_) {
            const double v = *spare_;
            spare_.reset();
            return v;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform_open()));
        const double th = 2.0 * std::numbers::pi * uniform01();
        spare_ = r * std::sin(th);
        return r * std::cos(th);
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    std::uint64_t state_;
    std::optional<double> spare_;
};

/// Standard symmetric alpha-stable variate with characteristic function
/// exp(-|xi|^alpha) (Chambers-Mallows-Stuck).
inline double sample_stable_1d(double alpha, CounterRng& rng) {
    if (!(alpha > 0 && alpha < 2)) throw std::domain_error("alpha must lie in (0,2)");
    const double u = std::numbers::pi * (rng.uniform_open() - 0.5);
    if (alpha == 1.0) return std::tan(u);
    const double w = rng.exponential();
    const double s = std::sin(alpha * u) / std::pow(std::cos(u), 1.0 / alpha);
    return s * std::pow(std::cos(u - alpha * u) / w, (1.0 - alpha) / alpha);
}

/// One-sided stable variate with Laplace transform exp(-lambda^a), a in (0,1)
/// (Kanter's representation).
inline double sample_stable_subordinator(double a, CounterRng& rng) {
    if (!(a > 0 && a < 1)) throw std::domain_error("subordinator index must lie in (0,1)");
    const double u = std::numbers::pi * rng.uniform_open();
    const double w = rng.exponential();
    const double A = std::pow(std::sin(a * u), a / (1.0 - a)) * std::sin((1.0 - a) * u) /
                     std::pow(std::sin(u), 1.0 / (1.0 - a));
    return std::pow(A / w, (1.0 - a) / a);
}

/// Increment of the Levy process generated by -(-Laplace)^{alpha/2} over dt:
/// law with characteristic function exp(-dt |xi|^alpha). 1D by CMS directly,
/// 2D isotropic by a positive (alpha/2)-stable time change of a Gaussian.
inline Vec sample_stable_increment(double alpha, double dt, int dim, CounterRng& rng) {
    if (dim == 1) return vec1(std::pow(dt, 1.0 / alpha) * sample_stable_1d(alpha, rng));
    const double s = std::pow(dt, 2.0 / alpha) * sample_stable_subordinator(alpha / 2.0, rng);
    const double g = std::sqrt(2.0 * s);
    return {g * rng.normal(), g * rng.normal()};
}

}  // namespace waldenfels
