#include "tcnfx/audio_buffer.hpp"

#include "tcnfx/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tcnfx {

AudioBuffer::AudioBuffer(int channels, std::size_t length, double sample_rate)
: channels_(channels)
, length_(length)
, sample_rate_(sample_rate)
, data_(static_cast<std::size_t>(channels) * length, 0.0f)
{
  if (channels < 0)
    throw Error(ErrorKind::InvalidInput, "channels", "negative channel count");
}

bool AudioBuffer::all_finite() const noexcept
{
  return std::all_of(data_.begin(), data_.end(), [](float v) { return std::isfinite(v); });
}

void AudioBuffer::require_finite(const char* what) const
{
  for (std::size_t i = 0; i < data_.size(); ++i)
    if (!std::isfinite(data_[i]))
      throw Error(ErrorKind::InvalidInput, what,
                  "non-finite sample at channel " + std::to_string(i / std::max<std::size_t>(length_, 1)) +
                    ", index " + std::to_string(i % std::max<std::size_t>(length_, 1)));
}

AudioBuffer AudioBuffer::slice(std::size_t offset, std::size_t count) const
{
  offset = std::min(offset, length_);
  count = std::min(count, length_ - offset);
  AudioBuffer out(channels_, count, sample_rate_);
  for (int c = 0; c < channels_; ++c) {
    auto src = channel(c).subspan(offset, count);
    std::copy(src.begin(), src.end(), out.channel(c).begin());
  }
  return out;
}

} // namespace tcnfx
