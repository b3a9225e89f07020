#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace tcnfx {

/// SplitMix64 (Steele, Lea & Flood 2014). Fixed output sequence for a given
/// state on every platform; used for all weight draws and calibration noise.
class SplitMix64 {
public:
  explicit constexpr SplitMix64(std::uint64_t state) noexcept : state_(state) {}

  constexpr std::uint64_t next() noexcept
  {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix(state_);
  }

  /// Uniform in [0, 1) with 53 bits of resolution.
  constexpr double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; only the cosine branch is used so each
  /// draw consumes exactly two words of the stream.
  double normal() noexcept
  {
    const double u1 = 1.0 - uniform(); // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept
  {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

private:
  std::uint64_t state_;
};

enum class StreamRole : std::uint64_t {
  Weight = 1,
  Bias = 2,
  Calibration = 3,
};

/// Independent stream key for one tensor: hash(seed, index, role).
constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t index, StreamRole role) noexcept
{
  std::uint64_t h = SplitMix64::mix(seed ^ 0x6A09E667F3BCC909ull);
  h = SplitMix64::mix(h ^ (index + 0x243F6A8885A308D3ull));
  h = SplitMix64::mix(h ^ (static_cast<std::uint64_t>(role) * 0x13198A2E03707344ull));
  return h;
}

} // namespace tcnfx
