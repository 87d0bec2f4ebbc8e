#pragma once

#include <cstdint>
#include <cstring>
#include <string>

namespace chimera {

// FNV-1a, used for config digests and determinism checks.
inline uint64_t fnv1a64(const void* data, size_t n, uint64_t h = 0xcbf29ce484222325ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

inline uint64_t fnv1a64(const std::string& s, uint64_t h = 0xcbf29ce484222325ull) {
    return fnv1a64(s.data(), s.size(), h);
}

inline std::string hex64(uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

// Accumulating hasher for mixed binary content.
class Hasher {
public:
    void update(const void* data, size_t n) { h_ = fnv1a64(data, n, h_); }
    void update(const std::string& s) { update(s.data(), s.size()); }
    void update(double v) { update(&v, sizeof v); }
    void update(uint64_t v) { update(&v, sizeof v); }
    void update(int64_t v) { update(&v, sizeof v); }
    void update(int v) { update(static_cast<int64_t>(v)); }
    uint64_t digest() const { return h_; }

private:
    uint64_t h_ = 0xcbf29ce484222325ull;
};

} // namespace chimera
