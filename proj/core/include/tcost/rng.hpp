#pragma once

#include <array>
#include <boost/random/normal_distribution.hpp>
#include <cstdint>

namespace tcost {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
///
/// A (seed, stream) pair selects an independent sequence; the block counter
/// runs within the stream. Paths use stream = path index, so results do not
/// depend on which thread simulates which path.
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;

  Philox4x32(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  /// Raw bijection; exposed for known-answer tests.
  static Block encrypt(Block ctr, std::array<std::uint32_t, 2> key) noexcept {
    for (int r = 0; r < 10; ++r) {
      const std::uint64_t p0 = std::uint64_t{kM0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kM1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
      key[0] += kW0;
      key[1] += kW1;
    }
    return ctr;
  }

  Block next_block() noexcept {
    const Block ctr{static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
                    static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
    ++counter_;
    return encrypt(ctr, key_);
  }

 private:
  static constexpr std::uint32_t kM0 = 0xD2511F53u;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kW0 = 0x9E3779B9u;
  static constexpr std::uint32_t kW1 = 0xBB67AE85u;

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

/// Philox words as a uniform random bit generator.
class PhiloxEngine {
 public:
  using result_type = std::uint32_t;

  PhiloxEngine(std::uint64_t seed, std::uint64_t stream) noexcept : gen_(seed, stream) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return 0xFFFFFFFFu; }

  result_type operator()() noexcept {
    if (pos_ == 4) {
      block_ = gen_.next_block();
      pos_ = 0;
    }
    return block_[pos_++];
  }

 private:
  Philox4x32 gen_;
  Philox4x32::Block block_{};
  int pos_ = 4;
};

/// Standard normals from one Philox stream (ziggurat sampler).
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream) noexcept : engine_(seed, stream) {}

  double next() { return dist_(engine_); }

 private:
  PhiloxEngine engine_;
  boost::random::normal_distribution<double> dist_;
};

/// SplitMix64 finalizer; derives child seeds (per measure, per asset).
[[nodiscard]] constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) noexcept {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace tcost
