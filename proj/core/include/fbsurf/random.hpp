#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace fbsurf {

/// Philox4x32-10 counter-based block cipher (Salmon et al., Random123).
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/// Standard normal deviate that depends only on (seed, index).
///
/// Derivation, fixed across releases:
///   key     = (low 32 bits of seed, high 32 bits of seed)
///   counter = (low 32 bits of index, high 32 bits of index, 0, 0)
///   (x0, x1, x2, x3) = Philox4x32-10(counter, key)
///   u1 = ((x0 << 32 | x1) >> 11 + 1) * 2^-53      in (0, 1]
///   u2 = ((x2 << 32 | x3) >> 11) * 2^-53          in [0, 1)
///   xi = sqrt(-2 ln u1) * cos(2 pi u2)             (Box-Muller, cosine branch)
double standard_normal(std::uint64_t seed, std::uint64_t index);

/// xi_1 .. xi_{k_max}: element k-1 is standard_normal(seed, k). Extending
/// k_max keeps every earlier draw.
std::vector<double> gaussian_draws(std::uint64_t seed, std::size_t k_max);

}  // namespace fbsurf
