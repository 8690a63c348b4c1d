#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace nelson::rng {

// Philox4x32-10 counter-based generator (Salmon et al. constants).
using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

inline Counter philox4x32(Counter c, Key k) {
    constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    for (int r = 0; r < 10; ++r) {
        const std::uint64_t p0 = std::uint64_t(M0) * c[0];
        const std::uint64_t p1 = std::uint64_t(M1) * c[2];
        c = {std::uint32_t(p1 >> 32) ^ c[1] ^ k[0], std::uint32_t(p1),
             std::uint32_t(p0 >> 32) ^ c[3] ^ k[1], std::uint32_t(p0)};
        k[0] += W0;
        k[1] += W1;
    }
    return c;
}

inline Key make_key(std::uint64_t seed) { return {std::uint32_t(seed), std::uint32_t(seed >> 32)}; }

// Uniform in the open interval (0,1) from 32 random bits.
inline double to_open_unit(std::uint32_t x) { return (double(x) + 0.5) * 0x1p-32; }

// Four standard normals for (seed, stream, a, b) via Box-Muller.
inline std::array<double, 4> normals4(std::uint64_t seed, std::uint64_t stream, std::uint32_t a,
                                      std::uint32_t b) {
    const Counter r =
        philox4x32({a, b, std::uint32_t(stream), std::uint32_t(stream >> 32)}, make_key(seed));
    std::array<double, 4> z{};
    for (int i = 0; i < 2; ++i) {
        const double u1 = to_open_unit(r[2 * i]);
        const double u2 = to_open_unit(r[2 * i + 1]);
        const double rad = std::sqrt(-2.0 * std::log(u1));
        const double th = 6.283185307179586 * u2;
        z[2 * i] = rad * std::cos(th);
        z[2 * i + 1] = rad * std::sin(th);
    }
    return z;
}

// Four uniforms on (0,1), keyed the same way.
inline std::array<double, 4> uniforms4(std::uint64_t seed, std::uint64_t stream, std::uint32_t a,
                                       std::uint32_t b) {
    const Counter r =
        philox4x32({a, b, std::uint32_t(stream), std::uint32_t(stream >> 32)}, make_key(seed));
    return {to_open_unit(r[0]), to_open_unit(r[1]), to_open_unit(r[2]), to_open_unit(r[3])};
}

}  // namespace nelson::rng
