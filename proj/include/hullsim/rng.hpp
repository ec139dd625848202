#pragma once

// Counter-based random streams (Philox4x32-10, Salmon et al. SC 2011) with
// O(1) random access by sample index. Every deviate is a pure function of
// (seed, index, component, domain), so chunked or multi-threaded generation
// reproduces the sequential stream exactly.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace hullsim {

namespace detail {

inline constexpr uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(std::array<uint32_t, 4>& c, const std::array<uint32_t, 2>& k) {
  const uint64_t p0 = static_cast<uint64_t>(kPhiloxM0) * c[0];
  const uint64_t p1 = static_cast<uint64_t>(kPhiloxM1) * c[2];
  const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32);
  const uint32_t lo0 = static_cast<uint32_t>(p0);
  const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32);
  const uint32_t lo1 = static_cast<uint32_t>(p1);
  c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace detail

inline std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> counter,
                                          std::array<uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    detail::philox_round(counter, key);
    key[0] += detail::kPhiloxW0;
    key[1] += detail::kPhiloxW1;
  }
  return counter;
}

// Domain tags keep unrelated uses of the same (seed, index) pair on disjoint
// counter blocks.
inline constexpr uint32_t kDomainSamples = 0;
inline constexpr uint32_t kDomainDirections = 1;
inline constexpr uint32_t kDomainAux = 2;

inline std::array<uint32_t, 4> philox_block(uint64_t seed, uint64_t index, uint32_t slot,
                                            uint32_t domain) {
  const std::array<uint32_t, 4> counter = {static_cast<uint32_t>(index),
                                           static_cast<uint32_t>(index >> 32), slot, domain};
  const std::array<uint32_t, 2> key = {static_cast<uint32_t>(seed),
                                       static_cast<uint32_t>(seed >> 32)};
  return philox4x32(counter, key);
}

// 53-bit uniform on [0, 1) from words (a, b) of a block.
inline double uniform_from_words(uint32_t a, uint32_t b) {
  const uint64_t w = (static_cast<uint64_t>(b) << 32) | a;
  return static_cast<double>(w >> 11) * 0x1.0p-53;
}

inline double uniform01(uint64_t seed, uint64_t index, uint32_t slot = 0,
                        uint32_t domain = kDomainAux) {
  const auto x = philox_block(seed, index, slot, domain);
  return uniform_from_words(x[0], x[1]);
}

// Box-Muller pair from a single counter block. The radial uniform is shifted
// into (0, 1] so the logarithm is always finite.
inline std::pair<double, double> normal_pair(uint64_t seed, uint64_t index, uint32_t pair = 0,
                                             uint32_t domain = kDomainSamples) {
  const auto x = philox_block(seed, index, pair, domain);
  const uint64_t w1 = (static_cast<uint64_t>(x[1]) << 32) | x[0];
  const double u1 = static_cast<double>((w1 >> 11) + 1) * 0x1.0p-53;
  const double u2 = uniform_from_words(x[2], x[3]);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(t), r * std::sin(t)};
}

// Component c of the standard-normal vector attached to (seed, index).
// Components 2p and 2p+1 share the Box-Muller block with pair id p, so lower
// components are unaffected by how many are consumed.
inline double standard_normal(uint64_t seed, uint64_t index, uint32_t component = 0,
                              uint32_t domain = kDomainSamples) {
  const auto z = normal_pair(seed, index, component >> 1, domain);
  return (component & 1u) ? z.second : z.first;
}

}  // namespace hullsim
