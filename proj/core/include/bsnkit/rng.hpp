#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace bsnkit {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
//
// The 64-bit seed is the key; the 128-bit counter is split into a 64-bit
// block index and a 64-bit stream id. Independent replicas use the same seed
// with different stream ids, so results do not depend on how work is
// scheduled across threads. Output is identical on every platform.
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Block generate(Block ctr, Key key) {
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

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

// Stream of variates drawn from Philox4x32-10. Normals use Box-Muller and
// exponentials use inversion so every distribution is portable bit-for-bit.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0, std::uint64_t stream = 0)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  std::uint64_t seed() const { return (std::uint64_t{key_[1]} << 32) | key_[0]; }
  std::uint64_t stream() const { return stream_; }

  std::uint32_t next_u32() {
    if (lane_ == 4) refill();
    return buffer_[lane_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on the open interval (0, 1).
  double uniform_open() { return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52; }

  // Uniform on (-1, 1).
  double uniform_signed() { return 2.0 * uniform_open() - 1.0; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double radius = std::sqrt(-2.0 * std::log(uniform_open()));
    const double angle = 6.283185307179586 * uniform();
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  double exponential(double mean) { return -mean * std::log(uniform_open()); }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  void refill() {
    const Philox4x32::Block ctr{static_cast<std::uint32_t>(block_),
                                static_cast<std::uint32_t>(block_ >> 32),
                                static_cast<std::uint32_t>(stream_),
                                static_cast<std::uint32_t>(stream_ >> 32)};
    buffer_ = Philox4x32::generate(ctr, key_);
    ++block_;
    lane_ = 0;
  }

  Philox4x32::Key key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  Philox4x32::Block buffer_{};
  int lane_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Stream ids for a replica nested inside an experiment index.
constexpr std::uint64_t substream(std::uint64_t stream, std::uint64_t index) {
  return (stream << 24) ^ (index + 1) * 0x9E3779B97F4A7C15ull;
}

}  // namespace bsnkit
