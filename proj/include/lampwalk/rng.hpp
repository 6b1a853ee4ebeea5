#pragma once

#include <array>
#include <cstdint>

namespace lampwalk {

// Philox4x32-10 counter-based generator. A stream is addressed by
// (seed, stream): the seed is the Philox key, the stream id occupies counter
// lanes 2..3, and the block index occupies lanes 0..1. Distinct streams under
// the same seed therefore never share a counter, which is what makes
// per-sample streams reproducible independently of scheduling.
class PhiloxRng {
 public:
  PhiloxRng(std::uint64_t seed, std::uint64_t stream)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                            std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
             static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
             static_cast<std::uint32_t>(p0)};
      key[0] += 0x9E3779B9u;
      key[1] += 0xBB67AE85u;
    }
    return ctr;
  }

  std::uint32_t next_u32() {
    if (avail_ == 0) refill();
    return buf_[4 - avail_--];
  }

  std::uint64_t next_u64() {
    if (avail_ < 2) refill();
    const std::uint32_t lo = buf_[4 - avail_--];
    const std::uint32_t hi = buf_[4 - avail_--];
    return (std::uint64_t{hi} << 32) | lo;
  }

  // Uniform in [0,1) with 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [0,n), unbiased via rejection. n must be positive.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t rem = (~n + 1) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t x = next_u64();
      if (x >= rem) return x % n;
    }
  }

 private:
  void refill() {
    buf_ = block({static_cast<std::uint32_t>(counter_),
                  static_cast<std::uint32_t>(counter_ >> 32),
                  static_cast<std::uint32_t>(stream_),
                  static_cast<std::uint32_t>(stream_ >> 32)},
                 key_);
    ++counter_;
    avail_ = 4;
  }

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int avail_ = 0;
};

}  // namespace lampwalk
