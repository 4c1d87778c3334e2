#include "fbsurf/random.hpp"

#include <cmath>
#include <numbers>

namespace fbsurf {

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
    constexpr std::uint64_t kM0 = 0xD2511F53u;
    constexpr std::uint64_t kM1 = 0xCD9E8D57u;
    constexpr std::uint32_t kW0 = 0x9E3779B9u;
    constexpr std::uint32_t kW1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kW0;
            key[1] += kW1;
        }
        const std::uint64_t p0 = kM0 * ctr[0];
        const std::uint64_t p1 = kM1 * ctr[2];
        ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
               static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
}

double standard_normal(std::uint64_t seed, std::uint64_t index) {
    const auto x = philox4x32_10(
        {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0u, 0u},
        {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
    constexpr double kTwoM53 = 1.0 / 9007199254740992.0;
    const std::uint64_t a = ((static_cast<std::uint64_t>(x[0]) << 32) | x[1]) >> 11;
    const std::uint64_t b = ((static_cast<std::uint64_t>(x[2]) << 32) | x[3]) >> 11;
    const double u1 = static_cast<double>(a + 1) * kTwoM53;
    const double u2 = static_cast<double>(b) * kTwoM53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<double> gaussian_draws(std::uint64_t seed, std::size_t k_max) {
    std::vector<double> xi(k_max);
    for (std::size_t k = 0; k < k_max; ++k) xi[k] = standard_normal(seed, k + 1);
    return xi;
}

}  // namespace fbsurf
