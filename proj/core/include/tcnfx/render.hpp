#pragma once

#include "tcnfx/audio_buffer.hpp"
#include "tcnfx/preset.hpp"

#include <cstddef>
#include <cstdint>

namespace tcnfx {

inline constexpr std::size_t kDefaultBlockSize = 512;

struct RenderStats {
  std::int64_t receptive_field = 0;
  std::int64_t params = 0;
  double makeup = 1.0;
  bool dead_network = false;
  double processing_seconds = 0.0;
  double audio_seconds = 0.0;
  double real_time_factor() const noexcept { return audio_seconds > 0 ? processing_seconds / audio_seconds : 0.0; }
};

struct RenderResult {
  AudioBuffer output;
  RenderStats stats;
};

/// Streams `input` through a fresh engine built from `preset`, block by
/// block. The input channel count must match the preset's in_channels.
RenderResult render(const Preset& preset, const AudioBuffer& input, std::size_t block_size = kDefaultBlockSize);

} // namespace tcnfx
