#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace chimera {

// splitmix64; used to derive per-stage seeds from the master seed.
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline uint64_t derive_seed(uint64_t master, uint64_t stage_tag) {
    return splitmix64(master ^ splitmix64(stage_tag));
}

// Deterministic RNG. The mt19937_64 sequence is pinned by the standard, but
// the std distributions are not, so bounded draws are implemented here to
// keep artifacts byte-identical across toolchains.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    uint64_t next_u64() { return eng_(); }

    // unbiased draw in [0, n)
    uint64_t below(uint64_t n) {
        uint64_t lim = (-n) % n; // 2^64 mod n
        uint64_t v;
        do {
            v = next_u64();
        } while (v < lim);
        return v % n;
    }

    // [0, 1)
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // standard normal via Box-Muller
    double normal() {
        double u1;
        do {
            u1 = uniform01();
        } while (u1 == 0.0);
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

private:
    std::mt19937_64 eng_;
};

} // namespace chimera
