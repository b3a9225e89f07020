// tcnfx: render audio through randomly weighted dilated causal TCNs,
// inspect architectures, benchmark, manage presets and serve the UI bridge.

#include "tcnfx/bench.hpp"
#include "tcnfx/bridge.hpp"
#include "tcnfx/describe.hpp"
#include "tcnfx/error.hpp"
#include "tcnfx/noise.hpp"
#include "tcnfx/preset.hpp"
#include "tcnfx/render.hpp"
#include "tcnfx/wav.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace {

using namespace tcnfx;

// Every flag maps onto exactly one preset key and overrides the preset file.
struct ConfigFlags {
  std::string preset_path;
  std::vector<std::pair<std::string, std::optional<std::string>>> values;

  void add_to(CLI::App* app)
  {
    app->add_option("--preset", preset_path, "Preset file to start from")->check(CLI::ExistingFile);
    static const std::vector<std::tuple<const char*, const char*, const char*>> table = {
      {"--layers", "num_layers", "Number of conv + activation blocks"},
      {"--kernel", "kernel_size", "Taps per filter"},
      {"--dilation-growth", "dilation_growth", "Dilation of layer l is growth^l"},
      {"--channels", "channel_width", "Hidden channel count"},
      {"--in-ch", "in_channels", "Input channels (1 or 2)"},
      {"--out-ch", "out_channels", "Output channels (1 or 2)"},
      {"--activation", "activation", "linear|relu|tanh|sigmoid|softsign|leaky_relu"},
      {"--init", "init", "normal|uniform|glorot_uniform|he_normal"},
      {"--init-param", "init_param", "Std-dev (normal) or bound (uniform)"},
      {"--depthwise", "depthwise", "Depthwise hidden layers (true|false)"},
      {"--bias", "use_bias", "Enable biases (true|false)"},
      {"--seed", "seed", "Global seed"},
      {"--input-gain", "input_gain_db", "Input gain in dB"},
      {"--output-gain", "output_gain_db", "Output gain in dB"},
      {"--mix", "mix", "Wet/dry mix in [0, 1]"},
      {"--dc-blocker", "dc_blocker", "10 Hz DC blocker on the wet path (true|false)"},
    };
    values.reserve(table.size() + 1);
    for (const auto& [flag, key, help] : table) {
      values.emplace_back(key, std::nullopt);
      auto* opt = app->add_option(flag, values.back().second, help);
      if (std::string_view(key) == "depthwise" || std::string_view(key) == "use_bias" ||
          std::string_view(key) == "dc_blocker")
        opt->expected(0, 1)->default_str("true");
    }
    values.emplace_back("name", std::nullopt);
    app->add_option("--name", values.back().second, "Preset name");
  }

  Preset resolve() const
  {
    Preset preset = preset_path.empty() ? Preset{} : load_preset(preset_path);
    for (const auto& [key, value] : values) {
      if (!value)
        continue;
      if (key == "name") {
        preset.name = *value;
        continue;
      }
      // Bare boolean flags arrive as an empty string.
      const bool is_bool = key == "depthwise" || key == "use_bias" || key == "dc_blocker";
      set_preset_field(preset, key, is_bool && value->empty() ? "true" : *value);
      if (key == "init" && !has("init_param"))
        preset.network.init = InitScheme::with_default(preset.network.init.kind);
    }
    preset.validate();
    return preset;
  }

  bool has(std::string_view key) const
  {
    for (const auto& [k, v] : values)
      if (k == key)
        return v.has_value();
    return false;
  }
};

int cmd_render(const ConfigFlags& flags, const std::string& in_path, const std::string& out_path,
               std::size_t block_size, const std::string& format)
{
  const Preset preset = flags.resolve();
  const AudioBuffer input = read_wav(in_path);
  const RenderResult result = render(preset, input, block_size);
  write_wav(out_path, result.output, format == "pcm16" ? WavFormat::Pcm16 : WavFormat::Float32);
  const auto& s = result.stats;
  std::printf("receptive field: %lld samples (%s ms)\n", static_cast<long long>(s.receptive_field),
              format_rf_ms(s.receptive_field, input.sample_rate()).c_str());
  std::printf("parameters:      %lld\n", static_cast<long long>(s.params));
  std::printf("seed:            %llu\n", static_cast<unsigned long long>(preset.network.seed));
  std::printf("makeup gain:     %.2f dB%s\n", gain_to_db(s.makeup), s.dead_network ? " (dead network)" : "");
  std::printf("real-time factor: %.4f (%.3f s for %.3f s of audio, block %zu)\n", s.real_time_factor(),
              s.processing_seconds, s.audio_seconds, block_size);
  if (s.dead_network)
    std::fprintf(stderr, "warning: network output is silent for this config\n");
  return 0;
}

int cmd_describe(const ConfigFlags& flags, double sample_rate)
{
  const Preset preset = flags.resolve();
  std::cout << describe(preset.network, sample_rate);
  return 0;
}

int cmd_bench(const std::string& sweep_path, const std::string& csv_path, double seconds, double sample_rate)
{
  std::vector<BenchCase> cases;
  if (sweep_path.empty()) {
    cases = default_sweep();
  } else {
    std::ifstream in(sweep_path);
    if (!in)
      throw Error(ErrorKind::Io, "sweep", "cannot open " + sweep_path);
    std::ostringstream ss;
    ss << in.rdbuf();
    cases = parse_sweep(ss.str());
  }
  std::vector<BenchResult> results;
  for (const auto& c : cases) {
    results.push_back(run_bench(c, sample_rate, seconds));
    std::fflush(stdout);
  }
  std::cout << bench_report_text(results);
  if (!csv_path.empty()) {
    std::ofstream out(csv_path);
    if (!out)
      throw Error(ErrorKind::Io, "csv", "cannot open " + csv_path + " for writing");
    out << bench_report_csv(results);
  }
  return 0;
}

BridgeServer* g_server = nullptr;

void on_signal(int)
{
  if (g_server)
    g_server->stop();
}

int cmd_serve(int port, std::size_t block_size, double sample_rate)
{
  BridgeOptions options;
  options.block_size = block_size;
  options.sample_rate = sample_rate;
  BridgeServer server(options);
  const int bound = server.bind(port);
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::printf("bridge listening on http://127.0.0.1:%d/bridge\n", bound);
  std::fflush(stdout);
  server.listen();
  g_server = nullptr;
  return 0;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Randomly weighted temporal convolutional networks as audio effects"};
  app.require_subcommand(1);

  ConfigFlags render_flags, describe_flags, save_flags;

  auto* render = app.add_subcommand("render", "Stream a WAV file through a network");
  std::string in_path, out_path, format = "float32";
  std::size_t block_size = kDefaultBlockSize;
  render->add_option("input", in_path, "Input WAV")->required()->check(CLI::ExistingFile);
  render->add_option("output", out_path, "Output WAV")->required();
  render->add_option("--block-size", block_size, "Samples per processing block")->check(CLI::PositiveNumber);
  render->add_option("--format", format, "Output sample format")->check(CLI::IsMember({"float32", "pcm16"}));
  render_flags.add_to(render);

  auto* describe_cmd = app.add_subcommand("describe", "Print receptive field, parameter count and layer table");
  double sample_rate = 44100.0;
  describe_cmd->add_option("--sample-rate", sample_rate, "Sample rate for the millisecond read-out")
    ->check(CLI::PositiveNumber);
  describe_flags.add_to(describe_cmd);

  auto* bench = app.add_subcommand("bench", "Measure real-time factors over a config sweep");
  std::string sweep_path, csv_path;
  double seconds = 5.0;
  double bench_rate = 44100.0;
  bench->add_option("--sweep", sweep_path, "Sweep file (label: key=value ...)")->check(CLI::ExistingFile);
  bench->add_option("--csv", csv_path, "Also write results as CSV");
  bench->add_option("--seconds", seconds, "Audio duration per case")->check(CLI::Range(5.0, 3600.0));
  bench->add_option("--sample-rate", bench_rate, "Sample rate")->check(CLI::PositiveNumber);

  auto* preset = app.add_subcommand("preset", "Save or load presets");
  preset->require_subcommand(1);
  auto* save = preset->add_subcommand("save", "Write a preset from flags");
  std::string save_path;
  save->add_option("file", save_path, "Destination")->required();
  save_flags.add_to(save);
  auto* load = preset->add_subcommand("load", "Validate a preset and print it");
  std::string load_path;
  double load_rate = 44100.0;
  load->add_option("file", load_path, "Preset file")->required()->check(CLI::ExistingFile);
  load->add_option("--sample-rate", load_rate, "Sample rate for the millisecond read-out")
    ->check(CLI::PositiveNumber);

  auto* serve = app.add_subcommand("serve", "Serve the control-surface bridge on localhost");
  int port = 8765;
  std::size_t serve_block = kDefaultBlockSize;
  double serve_rate = 44100.0;
  serve->add_option("--port", port, "TCP port (0 picks a free one)")->check(CLI::Range(0, 65535));
  serve->add_option("--block-size", serve_block, "Engine block size")->check(CLI::PositiveNumber);
  serve->add_option("--sample-rate", serve_rate, "Engine sample rate")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (render->parsed())
      return cmd_render(render_flags, in_path, out_path, block_size, format);
    if (describe_cmd->parsed())
      return cmd_describe(describe_flags, sample_rate);
    if (bench->parsed())
      return cmd_bench(sweep_path, csv_path, seconds, bench_rate);
    if (save->parsed()) {
      const Preset p = save_flags.resolve();
      save_preset(save_path, p);
      std::cout << serialize_preset(p);
      return 0;
    }
    if (load->parsed()) {
      const Preset p = load_preset(load_path);
      std::cout << serialize_preset(p) << '\n' << describe(p.network, load_rate);
      return 0;
    }
    if (serve->parsed())
      return cmd_serve(port, serve_block, serve_rate);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
