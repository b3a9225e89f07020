#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tcnfx {

/// Planar multichannel float audio. Channel `c` occupies
/// samples()[c * length(), (c + 1) * length()).
class AudioBuffer {
public:
  AudioBuffer() = default;
  AudioBuffer(int channels, std::size_t length, double sample_rate = 44100.0);

  int channels() const noexcept { return channels_; }
  std::size_t length() const noexcept { return length_; }
  double sample_rate() const noexcept { return sample_rate_; }
  void set_sample_rate(double sr) noexcept { sample_rate_ = sr; }

  std::span<float> channel(int c) noexcept { return {data_.data() + static_cast<std::size_t>(c) * length_, length_}; }
  std::span<const float> channel(int c) const noexcept
  {
    return {data_.data() + static_cast<std::size_t>(c) * length_, length_};
  }

  std::span<float> samples() noexcept { return data_; }
  std::span<const float> samples() const noexcept { return data_; }

  bool all_finite() const noexcept;

  /// Throws Error(InvalidInput) on the first NaN or infinity.
  void require_finite(const char* what) const;

  /// Copy of samples [offset, offset + count) of every channel.
  AudioBuffer slice(std::size_t offset, std::size_t count) const;

  bool operator==(const AudioBuffer&) const = default;

private:
  int channels_ = 0;
  std::size_t length_ = 0;
  double sample_rate_ = 44100.0;
  std::vector<float> data_;
};

} // namespace tcnfx
