#pragma once

#include <cstdint>
#include <limits>

namespace cec {

/// Substream tags. Each consumer of randomness draws from its own tag so that
/// e.g. the kernel and the copula stay independent under a shared root seed.
enum class Stream : std::uint64_t {
  kernel = 1,
  copula = 2,
  allocation = 3,
  transform = 4,
  hedge = 5,
  validation = 6,
};

inline constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// xoshiro256** engine. Satisfies UniformRandomBitGenerator, so it plugs into
/// the <random> distributions.
///
/// Substreams are keyed by (root seed, stream tag, index): the index is a
/// scenario/path/row counter, so results do not depend on evaluation order and
/// scenario loops can be split across threads freely.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept { reseed(seed, 0, 0); }
  Rng(std::uint64_t seed, Stream stream, std::uint64_t index) noexcept {
    reseed(seed, static_cast<std::uint64_t>(stream), index);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform on the open interval (0, 1); never returns 0 or 1.
  double uniform() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  void reseed(std::uint64_t seed, std::uint64_t stream,
              std::uint64_t index) noexcept {
    std::uint64_t sm = seed;
    std::uint64_t key = splitmix64(sm);
    sm = key ^ (stream * 0xd1b54a32d192ed03ULL);
    key = splitmix64(sm);
    sm = key ^ (index * 0x8cb92ba72f3d8dd7ULL);
    for (auto& word : s_) word = splitmix64(sm);
  }

  std::uint64_t s_[4]{};
};

}  // namespace cec
