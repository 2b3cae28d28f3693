#pragma once

// Counter-based random streams.
//
// Every random quantity in the library is drawn from a Philox4x32-10 stream
// whose key is derived from (master seed, purpose) and whose high counter
// words hold the sample index. Two streams with different (seed, purpose,
// index) never share a counter block, so per-sample draws do not depend on
// which worker runs the sample or in which order.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace dwedge {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

class Philox4x32 {
 public:
  using result_type = std::uint32_t;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return 0xFFFFFFFFu; }

  explicit Philox4x32(std::uint64_t key = 0, std::uint64_t stream = 0) noexcept
      : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)},
        counter_{0, 0, static_cast<std::uint32_t>(stream),
                 static_cast<std::uint32_t>(stream >> 32)} {}

  result_type operator()() noexcept {
    if (index_ == 4) {
      buffer_ = round10(counter_, key_);
      increment();
      index_ = 0;
    }
    return buffer_[index_++];
  }

  /// Uniform double in the open interval (0, 1), 53 bits.
  double uniform() noexcept {
    const std::uint64_t a = (*this)() >> 5;
    const std::uint64_t b = (*this)() >> 6;
    return (static_cast<double>((a << 26) | b) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal by Box-Muller; the second variate is cached.
  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
  }

  /// +1 or -1 with equal probability.
  double sign() noexcept { return ((*this)() & 1u) ? 1.0 : -1.0; }

  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  /// The keyed bijection applied to one counter block.
  static Block encrypt(Block ctr, Key key) noexcept { return round10(ctr, key); }

 private:

  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static Block round10(Block ctr, Key key) noexcept {
    for (int r = 0; r < 10; ++r) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
             static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
             static_cast<std::uint32_t>(p0)};
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    return ctr;
  }

  void increment() noexcept {
    if (++counter_[0] == 0) ++counter_[1];
  }

  Key key_;
  Block counter_;
  Block buffer_{};
  int index_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

using Rng = Philox4x32;

/// Stream for (master seed, purpose, index). Same triple, same draws.
inline Rng make_stream(std::uint64_t seed, std::string_view purpose,
                       std::uint64_t index = 0) noexcept {
  const std::uint64_t key = splitmix64(seed ^ splitmix64(fnv1a(purpose)));
  return Rng(key, index);
}

}  // namespace dwedge
