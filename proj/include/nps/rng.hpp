#pragma once
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace nps {

// Philox4x32-10 block cipher: a pure function of (counter, key), so random
// streams can be split into independent substreams and Monte Carlo trials
// parallelize reproducibly.
struct Philox4x32 {
  using u32 = std::uint32_t;
  using u64 = std::uint64_t;
  static constexpr u32 M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
  static constexpr u32 W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;

  static std::array<u32, 4> block(std::array<u32, 4> x, std::array<u32, 2> k) {
    for (int r = 0; r < 10; ++r) {
      u64 p0 = u64(M0) * x[0];
      u64 p1 = u64(M1) * x[2];
      x = {u32(p1 >> 32) ^ x[1] ^ k[0], u32(p1), u32(p0 >> 32) ^ x[3] ^ k[1], u32(p0)};
      k[0] += W0;
      k[1] += W1;
    }
    return x;
  }
};

namespace detail {
// splitmix64 finalizer, used to derive substream ids
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}
} // namespace detail

// Counter-based generator: key is the seed, counter words 2..3 carry the
// stream id, words 0..1 the position within the stream.
class Rng {
public:
  using u32 = std::uint32_t;
  using u64 = std::uint64_t;

  explicit Rng(u64 seed, u64 stream = 0) : seed_(seed), stream_(stream) {}

  Rng substream(u64 id) const { return Rng(seed_, detail::mix64(stream_ ^ detail::mix64(id))); }

  u32 next_u32() {
    if (have_ == 0) refill();
    return buf_[--have_];
  }

  u64 next_u64() {
    u64 hi = next_u32();
    return (hi << 32) | next_u32();
  }

  // uniform in [0,1) with 53 random bits
  double uniform01() {
    u64 bits = next_u64() >> 11;
    return double(bits) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  double rademacher() { return (next_u32() & 1u) ? 1.0 : -1.0; }

  // standard normal via Box-Muller, second value cached
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1 = uniform01(), u2 = uniform01();
    while (u1 == 0.0) u1 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

  // unbiased integer in [0, n)
  u64 below(u64 n) {
    if (n == 0) return 0;
    u64 max = std::numeric_limits<u64>::max();
    u64 limit = max - (max % n + 1) % n;
    u64 x = next_u64();
    while (x > limit) x = next_u64();
    return x % n;
  }

private:
  void refill() {
    auto out = Philox4x32::block({u32(pos_), u32(pos_ >> 32), u32(stream_), u32(stream_ >> 32)},
                                 {u32(seed_), u32(seed_ >> 32)});
    ++pos_;
    for (int i = 0; i < 4; ++i) buf_[i] = out[i];
    have_ = 4;
  }

  u64 seed_, stream_, pos_ = 0;
  u32 buf_[4] = {0, 0, 0, 0};
  int have_ = 0;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

} // namespace nps
