#include "tcnfx/engine.hpp"
#include "tcnfx/network.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

using namespace tcnfx;

namespace {

NetworkConfig shape(int layers, int kernel, int growth, bool depthwise)
{
  NetworkConfig c;
  c.num_layers = layers;
  c.kernel_size = kernel;
  c.dilation_growth = growth;
  c.channel_width = 8;
  c.depthwise = depthwise;
  c.activation = Activation::Tanh;
  return c;
}

AudioBuffer noise(int channels, std::size_t length)
{
  std::mt19937 rng(7);
  std::uniform_real_distribution<float> dist(-0.5f, 0.5f);
  AudioBuffer b(channels, length);
  for (auto& v : b.samples())
    v = dist(rng);
  return b;
}

} // namespace

static void BM_Activation(benchmark::State& state)
{
  const auto act = static_cast<Activation>(state.range(0));
  std::vector<float> values(65536);
  std::mt19937 rng(1);
  std::uniform_real_distribution<float> dist(-4.0f, 4.0f);
  for (auto& v : values)
    v = dist(rng);
  const std::vector<float> source = values;
  for (auto _ : state) {
    state.PauseTiming();
    values = source;
    state.ResumeTiming();
    apply_activation(act, std::span<float>(values));
    benchmark::ClobberMemory();
  }
  state.SetLabel(std::string(to_string(act)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(values.size()));
}
BENCHMARK(BM_Activation)->DenseRange(0, 5);

// One hidden 8 -> 8 layer at dilation 27 over 64k output samples.
static void BM_HiddenLayer(benchmark::State& state)
{
  const bool depthwise = state.range(0) != 0;
  const auto net = build_network(shape(5, 3, 3, depthwise));
  const Layer& layer = net.layers()[3];
  const std::size_t n = 65536;
  const auto in = noise(8, n + static_cast<std::size_t>(layer.spec.span()));
  AudioBuffer out(8, n);
  for (auto _ : state) {
    conv1d_causal(layer, view(in), view(out));
    benchmark::ClobberMemory();
  }
  state.SetLabel(depthwise ? "depthwise" : "dense");
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_HiddenLayer)->Arg(0)->Arg(1);

// Args: layers, growth, depthwise, block size. 11 layers of growth 3 is the
// 3 s / 4 s reverb shape; 8 layers of growth 2 is distortion scale.
static void BM_ProcessBlock(benchmark::State& state)
{
  const auto cfg = shape(static_cast<int>(state.range(0)), 3, static_cast<int>(state.range(1)), state.range(2) != 0);
  const auto block = static_cast<std::size_t>(state.range(3));
  StreamEngine engine(cfg, block, 44100.0);
  const auto in = noise(1, block);
  AudioBuffer out(engine.out_channels(), block);
  for (auto _ : state) {
    engine.process_block(view(in), view(out));
    benchmark::ClobberMemory();
  }
  const double audio_seconds = static_cast<double>(block) / 44100.0;
  // Inverted audio-seconds rate: printed as processing seconds per second of audio.
  state.counters["rtf"] = benchmark::Counter(audio_seconds, benchmark::Counter::kIsIterationInvariantRate |
                                                               benchmark::Counter::kInvert);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(block));
}
BENCHMARK(BM_ProcessBlock)
  ->ArgNames({"layers", "growth", "dw", "block"})
  ->Args({8, 2, 0, 512})
  ->Args({8, 2, 1, 512})
  ->Args({11, 3, 0, 512})
  ->Args({11, 3, 1, 512})
  ->Args({11, 3, 1, 4096})
  ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
