// prng.hpp — deterministic random source for seeded property suites
//
// splitmix64 generator with uniform/normal/complex draws. Kept independent of
// <random> so that identical seeds give identical streams on every platform
// (the CLI promises byte-identical reports for a fixed seed).
#pragma once

#include <cmath>
#include <cstdint>

#include "declab/common.hpp"

namespace declab {

class Prng {
public:
    explicit Prng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    // standard normal via Box-Muller
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    Complex complex_normal() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        const double r = std::sqrt(-std::log(u1));
        const double a = 6.283185307179586476925287 * u2;
        return Complex(r * std::cos(a), r * std::sin(a));
    }

    // derive an independent substream (for parallel/per-case seeding)
    Prng fork(std::uint64_t tag) {
        return Prng(next_u64() ^ (tag * 0x9e3779b97f4a7c15ULL));
    }

private:
    std::uint64_t state_;
};

} // namespace declab
