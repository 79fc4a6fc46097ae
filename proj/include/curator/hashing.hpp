#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace curator {

struct Hash128 {
    std::uint64_t hi = 0;
    std::uint64_t lo = 0;

    friend auto operator<=>(const Hash128&, const Hash128&) = default;
};

struct Hash128Hasher {
    std::size_t operator()(const Hash128& h) const noexcept {
        return static_cast<std::size_t>(h.lo ^ (h.hi * 0x9e3779b97f4a7c15ULL));
    }
};

/// MurmurHash3 x64 128-bit variant (Austin Appleby, public domain).
Hash128 murmur3_128(std::string_view data, std::uint64_t seed = 0) noexcept;

inline std::uint64_t murmur3_64(std::string_view data, std::uint64_t seed = 0) noexcept {
    return murmur3_128(data, seed).lo;
}

using Sha256Digest = std::array<unsigned char, 32>;

Sha256Digest sha256(std::string_view data);
std::string sha256_hex(std::string_view data);
std::string to_hex(const Sha256Digest& d);

/// splitmix64 finalizer; used to derive independent seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed derived from a global seed and a string key (doc id, stage name).
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view key) noexcept {
    return mix64(seed ^ murmur3_64(key, 0x5eed5eed5eedULL));
}

}  // namespace curator
