#pragma once

#include "tcnfx/audio_buffer.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace tcnfx {

enum class WavFormat { Float32, Pcm16 };

/// PCM 16/24-bit or IEEE float 32-bit, one or two channels, including
/// WAVE_FORMAT_EXTENSIBLE wrappers. PCM is scaled by 1/32768 (16-bit) or
/// 1/8388608 (24-bit), so full-scale negative maps to -1.0 exactly.
/// A data chunk cut short by the end of file yields the whole frames present.
AudioBuffer read_wav(const std::filesystem::path& path);
AudioBuffer decode_wav(std::span<const std::uint8_t> bytes);

/// PCM16 rounds half away from zero and clips to [-32768, 32767].
void write_wav(const std::filesystem::path& path, const AudioBuffer& buffer, WavFormat format = WavFormat::Float32);
std::vector<std::uint8_t> encode_wav(const AudioBuffer& buffer, WavFormat format = WavFormat::Float32);

std::int16_t float_to_pcm16(float v) noexcept;
inline float pcm16_to_float(std::int16_t v) noexcept { return static_cast<float>(v) / 32768.0f; }

} // namespace tcnfx
