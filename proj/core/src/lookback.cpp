#include "tcnfx/lookback.hpp"

#include <algorithm>
#include <cstring>

namespace tcnfx {

LookbackBuffer::LookbackBuffer(int channels, std::size_t history, std::size_t block_size)
: channels_(channels)
, history_(history)
, block_(block_size)
, data_(static_cast<std::size_t>(channels) * (history + block_size), 0.0f)
{
}

ConstPlanar LookbackBuffer::push(ConstPlanar block, float gain) noexcept
{
  return push_ramped(block, gain, gain);
}

ConstPlanar LookbackBuffer::push_ramped(ConstPlanar block, float gain_from, float gain_to) noexcept
{
  const std::size_t n = std::min(block.length, block_);
  pushed_ = n;
  for (int c = 0; c < channels_; ++c) {
    const float* src = block.channel(c);
    float* dst = row(c) + history_;
    if (gain_from == gain_to) {
      if (gain_to == 1.0f)
        std::copy(src, src + n, dst);
      else
        for (std::size_t t = 0; t < n; ++t)
          dst[t] = gain_to * src[t];
    } else {
      const float step = (gain_to - gain_from) / static_cast<float>(n);
      for (std::size_t t = 0; t < n; ++t)
        dst[t] = (gain_from + step * static_cast<float>(t + 1)) * src[t];
    }
  }
  return {data_.data(), capacity(), history_ + n, channels_};
}

ConstPlanar LookbackBuffer::recent(std::size_t n) const noexcept
{
  n = std::min(n, pushed_);
  return {data_.data() + history_ + pushed_ - n, capacity(), n, channels_};
}

void LookbackBuffer::advance(std::size_t n) noexcept
{
  n = std::min(n, pushed_);
  if (history_ > 0 && n > 0)
    for (int c = 0; c < channels_; ++c)
      std::memmove(row(c), row(c) + n, history_ * sizeof(float));
  pushed_ = 0;
}

void LookbackBuffer::reset() noexcept
{
  std::fill(data_.begin(), data_.end(), 0.0f);
  pushed_ = 0;
}

void LookbackBuffer::seed_from(const LookbackBuffer& other) noexcept
{
  const std::size_t keep = std::min(history_, other.history_);
  const int chans = std::min(channels_, other.channels_);
  for (int c = 0; c < channels_; ++c) {
    float* dst = row(c);
    std::fill(dst, dst + history_ - keep, 0.0f);
    if (c < chans) {
      const float* src = other.row(c) + other.history_ - keep;
      std::copy(src, src + keep, dst + history_ - keep);
    } else {
      std::fill(dst + history_ - keep, dst + history_, 0.0f);
    }
  }
  pushed_ = 0;
}

} // namespace tcnfx
