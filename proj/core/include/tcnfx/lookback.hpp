#pragma once

#include "tcnfx/network.hpp"

#include <cstddef>
#include <vector>

namespace tcnfx {

/// History of the last M input samples per channel followed by room for one
/// N-sample block. With M = RF - 1 the whole M + N window yields exactly N
/// valid output samples.
class LookbackBuffer {
public:
  LookbackBuffer() = default;
  LookbackBuffer(int channels, std::size_t history, std::size_t block_size);

  int channels() const noexcept { return channels_; }
  std::size_t history() const noexcept { return history_; }
  std::size_t block_size() const noexcept { return block_; }
  std::size_t capacity() const noexcept { return history_ + block_; }

  /// Per-channel storage actually allocated, in samples.
  std::size_t allocated_per_channel() const noexcept { return channels_ ? data_.size() / channels_ : 0; }

  /// Writes `gain * block` after the history. The returned window covers
  /// history + block.length samples and stays valid until advance().
  ConstPlanar push(ConstPlanar block, float gain = 1.0f) noexcept;
  ConstPlanar push_ramped(ConstPlanar block, float gain_from, float gain_to) noexcept;

  /// The samples written by the last push (the newest n of the window).
  ConstPlanar recent(std::size_t n) const noexcept;

  /// Drops the oldest n samples so the last M become the new history.
  void advance(std::size_t n) noexcept;

  void reset() noexcept;

  /// Copies the most recent min(M, other.M) history samples from `other`
  /// and zeroes anything older.
  void seed_from(const LookbackBuffer& other) noexcept;

  std::span<const float> history_of(int c) const noexcept
  {
    return {data_.data() + static_cast<std::size_t>(c) * capacity(), history_};
  }

private:
  float* row(int c) noexcept { return data_.data() + static_cast<std::size_t>(c) * capacity(); }
  const float* row(int c) const noexcept { return data_.data() + static_cast<std::size_t>(c) * capacity(); }

  int channels_ = 0;
  std::size_t history_ = 0;
  std::size_t block_ = 0;
  std::size_t pushed_ = 0;
  std::vector<float> data_;
};

} // namespace tcnfx
