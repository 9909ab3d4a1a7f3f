#pragma once

#include <array>
#include <cstdint>

namespace mconv {

/// Philox4x32-10 block function: a keyed bijection on 128-bit counters.
/// Output depends only on (key, counter), never on call order.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Identifies one independent random stream: a user seed plus a stream id.
/// Draw i of a stream is a pure function of (seed, stream, i).
struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  /// Deterministically derived sub-stream; distinct children of the same
  /// parent never collide with each other or with the parent.
  StreamKey child(std::uint64_t which) const;

  friend bool operator==(const StreamKey&, const StreamKey&) = default;
};

/// 64 random bits for draw `index` of the stream.
std::uint64_t random_bits(StreamKey key, std::uint64_t index);

/// Uniform double in [0, 1) with 53 bits of resolution.
double uniform01(StreamKey key, std::uint64_t index);

/// Uniform integer in [0, n). Uses rejection, so it is exactly uniform.
std::uint64_t uniform_below(StreamKey key, std::uint64_t index, std::uint64_t n);

}  // namespace mconv
