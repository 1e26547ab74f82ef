#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace mmci {

// splitmix64; also used as a mixing function for counter-based streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
    return splitmix64(s);
}

// Deterministic stream of uniforms/gaussians. Results do not depend on the
// standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ^ 0xd1b54a32d192ed03ULL) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    // uniform in [0, 1)
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform in [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n)
    std::uint64_t bounded(std::uint64_t n) {
        // rejection-free Lemire reduction is overkill at these sizes
        return next_u64() % n;
    }

    double gaussian() {
        // Box-Muller; no caching so draw count per value is fixed.
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::uint64_t state_;
};

// Counter-based gaussian: value depends only on (seed, stream, counter),
// never on generation order.
inline double counter_gaussian(std::uint64_t seed, std::uint64_t stream,
                               std::uint64_t counter) {
    std::uint64_t s = mix64(mix64(seed, stream), counter);
    std::uint64_t a = splitmix64(s);
    std::uint64_t b = splitmix64(s);
    double u1 = static_cast<double>(a >> 11) * 0x1.0p-53;
    double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace mmci
