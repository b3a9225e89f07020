#include "tcnfx/noise.hpp"

#include "tcnfx/rng.hpp"

#include <cmath>

namespace tcnfx {

AudioBuffer white_noise(int channels, std::size_t length, double sample_rate, std::uint64_t seed)
{
  AudioBuffer out(channels, length, sample_rate);
  for (int c = 0; c < channels; ++c) {
    SplitMix64 rng(stream_key(seed, static_cast<std::uint64_t>(c), StreamRole::Calibration));
    for (auto& v : out.channel(c))
      v = static_cast<float>(rng.uniform(-1.0, 1.0));
  }
  return out;
}

AudioBuffer pink_noise(int channels, std::size_t length, double sample_rate, std::uint64_t seed, double target_rms)
{
  AudioBuffer out(channels, length, sample_rate);
  std::vector<double> tmp(length);
  double sum_sq = 0.0;
  std::vector<std::vector<double>> rows;
  rows.reserve(static_cast<std::size_t>(channels));
  for (int c = 0; c < channels; ++c) {
    SplitMix64 rng(stream_key(seed, static_cast<std::uint64_t>(c), StreamRole::Calibration));
    // Paul Kellet's refined pinking filter.
    double b0 = 0, b1 = 0, b2 = 0, b3 = 0, b4 = 0, b5 = 0, b6 = 0;
    for (std::size_t t = 0; t < length; ++t) {
      const double white = rng.uniform(-1.0, 1.0);
      b0 = 0.99886 * b0 + white * 0.0555179;
      b1 = 0.99332 * b1 + white * 0.0750759;
      b2 = 0.96900 * b2 + white * 0.1538520;
      b3 = 0.86650 * b3 + white * 0.3104856;
      b4 = 0.55000 * b4 + white * 0.5329522;
      b5 = -0.7616 * b5 - white * 0.0168980;
      tmp[t] = b0 + b1 + b2 + b3 + b4 + b5 + b6 + white * 0.5362;
      b6 = white * 0.115926;
      sum_sq += tmp[t] * tmp[t];
    }
    rows.push_back(tmp);
  }
  const double count = static_cast<double>(length) * channels;
  const double scale = sum_sq > 0.0 ? target_rms / std::sqrt(sum_sq / count) : 0.0;
  for (int c = 0; c < channels; ++c) {
    auto dst = out.channel(c);
    for (std::size_t t = 0; t < length; ++t)
      dst[t] = static_cast<float>(rows[static_cast<std::size_t>(c)][t] * scale);
  }
  return out;
}

double rms(const AudioBuffer& buffer) noexcept
{
  const auto s = buffer.samples();
  if (s.empty())
    return 0.0;
  double acc = 0.0;
  for (float v : s)
    acc += static_cast<double>(v) * v;
  return std::sqrt(acc / static_cast<double>(s.size()));
}

double db_to_gain(double db) noexcept { return std::pow(10.0, db / 20.0); }

double gain_to_db(double gain) noexcept { return 20.0 * std::log10(gain); }

} // namespace tcnfx
