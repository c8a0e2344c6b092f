#pragma once

#include <cstdint>
#include <random>

namespace fmpp {

// Seeded substreams. Every stochastic stage derives its own generator from
// (seed, domain, index) so results do not depend on evaluation order or on
// the number of worker threads. Domains keep simulation streams and
// resampling streams disjoint even when they share a base seed.
namespace rng_domain {
inline constexpr std::uint64_t kSimulate = 0x5149c09f2a62e3b1ULL;
inline constexpr std::uint64_t kResample = 0x9ae16a3b2f90404fULL;
inline constexpr std::uint64_t kGeneric = 0xc2b2ae3d27d4eb4fULL;
}  // namespace rng_domain

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t domain,
                                 std::uint64_t index = 0) {
  std::uint64_t a = splitmix64(seed ^ domain);
  std::uint64_t b = splitmix64(a ^ index);
  std::uint64_t c = splitmix64(b + 0x632be59bd9b4e019ULL);
  std::seed_seq seq{static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                    static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace fmpp
