#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace selflow {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
/// Stateless: the output is a pure function of (key, counter).
class Philox4x32 {
public:
    using counter_type = std::array<std::uint32_t, 4>;
    using key_type = std::array<std::uint32_t, 2>;

    static constexpr counter_type generate(counter_type ctr, key_type key) noexcept {
        for (int r = 0; r < 10; ++r) {
            if (r > 0) {
                key[0] += 0x9E3779B9u;
                key[1] += 0xBB67AE85u;
            }
            const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }
};

/// SplitMix64 finaliser; used to derive per-path seeds from a base seed.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Standard normal keyed by (seed, step, stream) via Box-Muller on one
/// Philox block.
inline double keyed_normal(std::uint64_t seed, std::uint64_t step, std::uint32_t stream) noexcept {
    const Philox4x32::key_type key{static_cast<std::uint32_t>(seed),
                                   static_cast<std::uint32_t>(seed >> 32)};
    const Philox4x32::counter_type ctr{static_cast<std::uint32_t>(step),
                                       static_cast<std::uint32_t>(step >> 32), stream, 0u};
    const auto w = Philox4x32::generate(ctr, key);
    const std::uint64_t a = (std::uint64_t{w[0]} << 32) | w[1];
    const std::uint64_t b = (std::uint64_t{w[2]} << 32) | w[3];
    constexpr double scale = 0x1.0p-53;
    const double u1 = (static_cast<double>(a >> 11) + 0.5) * scale;  // (0, 1)
    const double u2 = static_cast<double>(b >> 11) * scale;          // [0, 1)
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace selflow
