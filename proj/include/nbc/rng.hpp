#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace nbc {

inline uint64_t splitmix64(uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256++, seeded through splitmix64. All randomness in the library
// goes through this generator so that runs are bit-reproducible across
// platforms (std:: distributions are not portable). A (seed, stream) pair
// selects an independent substream; replicas and algorithm phases use
// disjoint streams.
class Rng {
public:
    explicit Rng(uint64_t seed, uint64_t stream = 0) {
        uint64_t x = seed ^ (0x632be59bd9b4e019ULL * (stream + 0x9e3779b97f4a7c15ULL));
        for (auto& w : state_) w = splitmix64(x);
    }

    uint64_t next() {
        uint64_t* s = state_.data();
        const uint64_t result = rotl(s[0] + s[3], 23) + s[0];
        const uint64_t t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = rotl(s[3], 45);
        return result;
    }

    // uniform in [0, 1), 53 random bits
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // uniform in [-1, 1)
    double uniform_pm1() { return 2.0 * uniform01() - 1.0; }

    // unbiased integer in [0, bound)
    uint64_t below(uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
        const uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    int8_t sign() { return (next() >> 63) ? int8_t{1} : int8_t{-1}; }

    double exponential() { return -std::log1p(-uniform01()); }

    // Poisson by Knuth's product method; large means are split in half so the
    // running product never underflows.
    long poisson(double mean) {
        if (mean < 0) throw std::invalid_argument("Rng::poisson: negative mean");
        long count = 0;
        while (mean > 30.0) {
            const double half = mean / 2;
            count += poisson(half);
            mean -= half;
        }
        const double limit = std::exp(-mean);
        double prod = uniform01();
        while (prod >= limit) {
            ++count;
            prod *= uniform01();
        }
        return count;
    }

private:
    static uint64_t rotl(uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }
    std::array<uint64_t, 4> state_;
};

}  // namespace nbc
