#pragma once
// Counter-based random streams. Every consumer derives an independent stream
// from (seed, tag, index), so trial i sees the same draws no matter how many
// trials run before it or on which thread.

#include <complex>
#include <cstdint>
#include <random>

namespace acf {

namespace detail {
// splitmix64 finalizer, used to whiten the (seed, tag, index) triple.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace detail

inline std::uint64_t stream_key(std::uint64_t seed, std::uint64_t tag,
                                std::uint64_t index) {
  return detail::mix64(detail::mix64(detail::mix64(seed) ^ tag) ^ index);
}

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : eng_(detail::mix64(seed)) {}
  RngStream(std::uint64_t seed, std::uint64_t tag, std::uint64_t index)
      : eng_(stream_key(seed, tag, index)) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform on [0,1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0,1]; safe as a log argument.
  double uniform_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Uniform integer in [0, n), rejection sampled so the law is exact.
  long long uniform_int(long long n) {
    const std::uint64_t un = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return static_cast<long long>(x % un);
  }

  // One N(0,1) variate by Box-Muller. Draws a full pair and discards the
  // second half so the consumption pattern is call-count deterministic.
  double gaussian() {
    const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
    const double t = 6.283185307179586476925286766559 * uniform();
    return r * std::cos(t);
  }

  // CN(0,1): E|z|^2 = 1, independent real and imaginary parts N(0,1/2).
  std::complex<double> cgaussian() {
    const double r = std::sqrt(-std::log(uniform_pos()));
    const double t = 6.283185307179586476925286766559 * uniform();
    return {r * std::cos(t), r * std::sin(t)};
  }

 private:
  std::mt19937_64 eng_;
};

// Stream tags. Keeping them in one place avoids accidental collisions.
inline constexpr std::uint64_t kTagChannel = 0x11;
inline constexpr std::uint64_t kTagE2E = 0x22;
inline constexpr std::uint64_t kTagSecondMoment = 0x33;
inline constexpr std::uint64_t kTagNoise = 0x44;
inline constexpr std::uint64_t kTagCode = 0x55;

}  // namespace acf
