#include "mconv/rng.hpp"

#include <stdexcept>

namespace mconv {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

StreamKey StreamKey::child(std::uint64_t which) const {
  // Children live in a hashed region of the stream space; collisions with
  // small user-chosen stream ids would need a 64-bit hash preimage.
  return StreamKey{seed, splitmix64(stream ^ splitmix64(which + 1))};
}

std::uint64_t random_bits(StreamKey key, std::uint64_t index) {
  const std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
      static_cast<std::uint32_t>(key.stream), static_cast<std::uint32_t>(key.stream >> 32)};
  const std::array<std::uint32_t, 2> k = {static_cast<std::uint32_t>(key.seed),
                                          static_cast<std::uint32_t>(key.seed >> 32)};
  const auto out = philox4x32(ctr, k);
  return (std::uint64_t{out[1]} << 32) | out[0];
}

double uniform01(StreamKey key, std::uint64_t index) {
  return static_cast<double>(random_bits(key, index) >> 11) * 0x1.0p-53;
}

std::uint64_t uniform_below(StreamKey key, std::uint64_t index, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_below: empty range");
  // Rejection sampling consumes sub-counters of the draw via a child stream,
  // so draw `index` remains a function of (key, index) alone.
  const std::uint64_t limit = std::uint64_t(-1) - (std::uint64_t(-1) % n);
  std::uint64_t bits = random_bits(key, index);
  for (std::uint64_t retry = 0; bits >= limit; ++retry) {
    bits = random_bits(key.child(index), retry);
  }
  return bits % n;
}

}  // namespace mconv
