#pragma once

#include "tcnfx/audio_buffer.hpp"

#include <cstdint>

namespace tcnfx {

/// Independent white noise per channel, uniform in [-1, 1).
AudioBuffer white_noise(int channels, std::size_t length, double sample_rate, std::uint64_t seed);

/// Seeded pink (-3 dB/octave) noise, normalized so the RMS over all channels
/// equals `target_rms` exactly (up to float rounding).
AudioBuffer pink_noise(int channels, std::size_t length, double sample_rate, std::uint64_t seed, double target_rms);

/// RMS over every sample of every channel, accumulated in double.
double rms(const AudioBuffer& buffer) noexcept;

double db_to_gain(double db) noexcept;
double gain_to_db(double gain) noexcept;

} // namespace tcnfx
