#pragma once

#include <cstdint>
#include <random>

namespace slab {

// Engine for draw number `counter` of the stream named by `seed`. Any draw can
// be replayed on its own, which keeps results independent of the worker
// count.
inline std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t counter) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(counter), static_cast<std::uint32_t>(counter >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace slab
