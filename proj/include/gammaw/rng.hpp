#pragma once

// Counter-based normal variates: Philox4x32-10 keyed by a hash of
// (seed, stream), with the counter built from (path, block). Any (seed, stream, path) triple
// reproduces the same sequence regardless of evaluation order.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace gammaw {

inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kMul0 = 0xD2511F53u, kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u, kWeyl1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

/// splitmix64 finalizer, used to derive stream identifiers.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

constexpr std::uint64_t combine_stream(std::uint64_t a, std::uint64_t b) { return mix64(a ^ mix64(b + 0x632BE59BD9B4E019ull)); }

/// Standard normals for one path of one stream. `negate` yields the
/// antithetic partner sequence.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t path, bool negate = false)
      : key_{static_cast<std::uint32_t>(combine_stream(seed, stream)),
             static_cast<std::uint32_t>(combine_stream(seed, stream) >> 32)},
        path_(path),
        sign_(negate ? -1.0 : 1.0) {}

  double operator()() {
    if (next_ == 4) refill();
    return sign_ * buffer_[next_++];
  }

 private:
  void refill() {
    const auto r =
        philox4x32({block_, static_cast<std::uint32_t>(path_), static_cast<std::uint32_t>(path_ >> 32), 0u}, key_);
    ++block_;
    constexpr double kScale = 1.0 / 4294967296.0;
    for (int k = 0; k < 4; k += 2) {
      const double u1 = (static_cast<double>(r[k]) + 0.5) * kScale;
      const double u2 = (static_cast<double>(r[k + 1]) + 0.5) * kScale;
      const double radius = std::sqrt(-2.0 * std::log(u1));
      const double angle = 2.0 * std::numbers::pi * u2;
      buffer_[k] = radius * std::cos(angle);
      buffer_[k + 1] = radius * std::sin(angle);
    }
    next_ = 0;
  }

  std::array<std::uint32_t, 2> key_;
  std::uint64_t path_;
  double sign_;
  std::uint32_t block_ = 0;
  std::array<double, 4> buffer_{};
  int next_ = 4;
};

struct ZeroNoise {
  double operator()() const { return 0.0; }
};

}  // namespace gammaw
