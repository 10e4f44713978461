#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "tordiff/angles.hpp"

namespace tordiff {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
}  // namespace detail

/// Deterministic random stream. All samplers in the library draw from this
/// class only, so results are reproducible bit-for-bit given a seed.
///
/// Independent substreams are derived by mixing a stream index into the base
/// seed: substream(base, i) seeds from splitmix64(base ^ (i + 1) * golden).
/// Replicate i of any Monte Carlo experiment uses substream(base_seed, i).
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : engine_(detail::splitmix64(seed)) {}

    static RngStream substream(std::uint64_t base_seed, std::uint64_t index) {
        return RngStream(base_seed ^ ((index + 1) * 0x9e3779b97f4a7c15ULL));
    }

    /// Uniform on [0, 1).
    double uniform() {
        // 53-bit mantissa fill
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform on (0, 1), never exactly 0.
    double uniform_pos() {
        double u;
        do {
            u = uniform();
        } while (u <= 0.0);
        return u;
    }

    /// Standard normal via Box-Muller (one draw per call, deterministic).
    double normal() {
        double u1 = uniform_pos();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    double normal(double mean, double variance) { return mean + std::sqrt(variance) * normal(); }

    /// Standard Cauchy (location 0, scale 1).
    double cauchy() { return std::tan(pi * (uniform() - 0.5)); }

    std::uint64_t raw() { return engine_(); }

  private:
    std::mt19937_64 engine_;
};

}  // namespace tordiff
