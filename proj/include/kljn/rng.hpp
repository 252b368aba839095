#ifndef KLJN_RNG_HPP_
#define KLJN_RNG_HPP_

#include <array>
#include <cstdint>

namespace kljn {

/*
 * Philox4x32-10 counter-based generator (Salmon et al., "Parallel random
 * numbers: as easy as 1, 2, 3", SC'11).
 *
 * Stream derivation rule:
 *   key     = (seed low 32 bits, seed high 32 bits)
 *   counter = (block low, block high, stream low, stream high)
 *
 * A (seed, stream) pair therefore addresses an independent sequence of
 * 2^64 blocks. Each block yields four 32-bit words, consumed as two 64-bit
 * words (word0 | word1 << 32, then word2 | word3 << 32). Nothing is shared
 * between generators, so any number of streams may be drawn concurrently.
 */
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr int kRounds = 10;

  static constexpr Counter block(Counter ctr, Key key) {
    ctr = round(ctr, key);
    for (int r = 1; r < kRounds; ++r) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
      ctr = round(ctr, key);
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static constexpr Counter round(const Counter &ctr, const Key &key) {
    const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
};

/// Sequential reader over one Philox stream.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  std::uint64_t next_u64() {
    if (half_ == 0) {
      const Philox4x32::Counter ctr{
          static_cast<std::uint32_t>(block_),
          static_cast<std::uint32_t>(block_ >> 32),
          static_cast<std::uint32_t>(stream_),
          static_cast<std::uint32_t>(stream_ >> 32)};
      buffer_ = Philox4x32::block(ctr, key_);
      ++block_;
    }
    const std::uint64_t out = std::uint64_t{buffer_[2 * half_]} |
                              (std::uint64_t{buffer_[2 * half_ + 1]} << 32);
    half_ ^= 1;
    return out;
  }

  /// Uniform on [0, 1) with 53 random bits.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform on the open interval (0, 1).
  double next_open_unit() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  bool next_bool() { return (next_u64() >> 63) != 0; }

 private:
  Philox4x32::Key key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  Philox4x32::Counter buffer_{};
  unsigned half_ = 0;
};

}  // namespace kljn

#endif  // KLJN_RNG_HPP_
