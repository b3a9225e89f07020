#include "tcnfx/render.hpp"

#include "tcnfx/engine.hpp"
#include "tcnfx/error.hpp"

#include <algorithm>
#include <chrono>
#include <string>

namespace tcnfx {

RenderResult render(const Preset& preset, const AudioBuffer& input, std::size_t block_size)
{
  preset.validate();
  if (input.channels() != preset.network.in_channels)
    throw Error(ErrorKind::ChannelMismatch, "in_channels",
                "input has " + std::to_string(input.channels()) + " channels but the preset expects " +
                  std::to_string(preset.network.in_channels));
  input.require_finite("input");

  EngineOptions options;
  options.dc_blocker = preset.dc_blocker;
  StreamEngine engine(preset.network, block_size, input.sample_rate(), options);
  engine.set_gains(preset.gains);

  RenderResult result{AudioBuffer(engine.out_channels(), input.length(), input.sample_rate()), {}};
  const ConstPlanar in = view(input);
  const MutablePlanar out = view(result.output);

  const auto start = std::chrono::steady_clock::now();
  for (std::size_t pos = 0; pos < input.length(); pos += block_size) {
    const std::size_t n = std::min(block_size, input.length() - pos);
    engine.process_block(ConstPlanar{in.data + pos, in.stride, n, in.channels},
                         MutablePlanar{out.data + pos, out.stride, n, out.channels});
  }
  const auto elapsed = std::chrono::steady_clock::now() - start;

  result.stats.receptive_field = engine.receptive_field();
  result.stats.params = param_count(preset.network);
  result.stats.makeup = engine.auto_gain();
  result.stats.dead_network = engine.dead_network();
  result.stats.processing_seconds = std::chrono::duration<double>(elapsed).count();
  result.stats.audio_seconds = static_cast<double>(input.length()) / input.sample_rate();
  return result;
}

} // namespace tcnfx
