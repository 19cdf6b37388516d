#pragma once

#include <cmath>
#include <cstdint>

namespace hashalloc {

// Splittable 64-bit generator: (seed, stream) fully determines the sequence,
// so per-path streams fan out deterministically and in parallel.
class PathRng {
public:
    PathRng(std::uint64_t seed, std::uint64_t stream) {
        state_ = mix(seed ^ 0x2545f4914f6cdd1dULL) + mix(stream * 0x9e3779b97f4a7c15ULL + 1);
        state_ = mix(state_);
    }

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform on the open interval (0, 1).
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

// Uniform source with an optional antithetic flip (u -> 1-u), used to pair
// mirrored simulation paths.
class UniformSource {
public:
    UniformSource(std::uint64_t seed, std::uint64_t stream, bool flip)
        : rng_(seed, stream), flip_(flip) {}

    double next() {
        const double u = rng_.uniform();
        return flip_ ? 1.0 - u : u;
    }

    double exponential(double rate) { return -std::log(next()) / rate; }

private:
    PathRng rng_;
    bool flip_;
};

}  // namespace hashalloc
