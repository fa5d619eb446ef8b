#ifndef PEERLOC_RNG_HPP
#define PEERLOC_RNG_HPP

#include <cstdint>
#include <random>

#include "peerloc/geometry.hpp"

namespace peerloc {

/// Purpose tags separating the independent random substreams derived from one
/// master seed. Every consumer of randomness owns a substream keyed by
/// (seed, tag, ids...), so results do not depend on iteration order or on how
/// work is split across threads.
enum class StreamTag : std::uint64_t {
  kTrajectory = 1,
  kZChain = 2,
  kMeasurement = 3,
  kIns = 4,
  kFilterInit = 5,
  kFilter = 6,
  kRansac = 7,
  kTest = 99,
};

namespace detail {
// splitmix64 finalizer; fixed constants, stable across platforms.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace detail

/// Stable 64-bit substream key.
inline std::uint64_t substream_key(std::uint64_t seed, StreamTag tag,
                                   std::uint64_t a = 0, std::uint64_t b = 0,
                                   std::uint64_t c = 0) {
  std::uint64_t h = detail::mix64(seed);
  h = detail::mix64(h ^ static_cast<std::uint64_t>(tag));
  h = detail::mix64(h ^ a);
  h = detail::mix64(h ^ b);
  h = detail::mix64(h ^ c);
  return h;
}

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Random engine bound to one substream.
class Rng {
 public:
  explicit Rng(std::uint64_t key) : engine_(key) {}
  Rng(std::uint64_t seed, StreamTag tag, std::uint64_t a = 0,
      std::uint64_t b = 0, std::uint64_t c = 0)
      : engine_(substream_key(seed, tag, a, b, c)) {}

  double uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
  }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double gaussian(double mean = 0.0, double stddev = 1.0) {
    return std::normal_distribution<double>(mean, stddev)(engine_);
  }
  double exponential(double mean) {
    return std::exponential_distribution<double>(1.0 / mean)(engine_);
  }
  int uniform_int(int lo, int hi) {  // inclusive bounds
    return std::uniform_int_distribution<int>(lo, hi)(engine_);
  }

  /// Uniform draw inside the disc of given radius around a center.
  Vec2 in_disc(const Vec2& center, double radius) {
    const double r = radius * std::sqrt(uniform());
    const double a = uniform(0.0, kTwoPi);
    return {center.x + r * std::cos(a), center.y + r * std::sin(a)};
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace peerloc

#endif  // PEERLOC_RNG_HPP
