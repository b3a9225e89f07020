#include "tcnfx/bench.hpp"

#include "tcnfx/engine.hpp"
#include "tcnfx/error.hpp"
#include "tcnfx/noise.hpp"
#include "tcnfx/preset.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace tcnfx {

namespace {

NetworkConfig make(int layers, int kernel, int growth, int width, bool depthwise, Activation act = Activation::Tanh)
{
  NetworkConfig c;
  c.num_layers = layers;
  c.kernel_size = kernel;
  c.dilation_growth = growth;
  c.channel_width = width;
  c.depthwise = depthwise;
  c.activation = act;
  c.seed = 1;
  return c;
}

double percentile(std::vector<double> v, double q)
{
  if (v.empty())
    return 0.0;
  std::sort(v.begin(), v.end());
  const double rank = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (v[hi] - v[lo]) * (rank - static_cast<double>(lo));
}

} // namespace

std::vector<BenchCase> default_sweep()
{
  return {
    {"trivial", make(1, 1, 1, 1, false, Activation::Linear), 512},
    {"overdrive", make(3, 3, 2, 8, false), 512},
    {"distortion-dense", make(8, 5, 2, 8, false), 512},
    {"distortion-depthwise", make(8, 5, 2, 8, true), 512},
    {"delay-dense", make(12, 3, 2, 8, false), 512},
    {"delay-depthwise", make(12, 3, 2, 8, true), 512},
    {"reverb4s-dense", make(11, 3, 3, 8, false), 512},
    {"reverb4s-depthwise", make(11, 3, 3, 8, true), 512},
    {"reverb4s-dense-b4096", make(11, 3, 3, 8, false), 4096},
    {"reverb4s-depthwise-b4096", make(11, 3, 3, 8, true), 4096},
  };
}

std::vector<BenchCase> parse_sweep(std::string_view text)
{
  std::vector<BenchCase> cases;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#')
      continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos)
      throw Error(ErrorKind::Format, "line " + std::to_string(line_no), "expected 'label: key=value ...'");
    BenchCase bench;
    bench.label = line.substr(first, colon - first);
    while (!bench.label.empty() && (bench.label.back() == ' ' || bench.label.back() == '\t'))
      bench.label.pop_back();
    Preset preset;
    preset.network = bench.config;
    std::istringstream tokens(line.substr(colon + 1));
    std::string tok;
    while (tokens >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos)
        throw Error(ErrorKind::Format, tok, "expected key=value");
      const std::string key = tok.substr(0, eq);
      const std::string value = tok.substr(eq + 1);
      if (key == "block_size") {
        std::size_t n = 0;
        const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
        if (ec != std::errc{} || ptr != value.data() + value.size() || n == 0)
          throw Error(ErrorKind::Format, "block_size", "expected a positive integer");
        bench.block_size = n;
      } else {
        set_preset_field(preset, key, value);
      }
    }
    preset.network.validate();
    bench.config = preset.network;
    cases.push_back(std::move(bench));
  }
  return cases;
}

BenchResult run_bench(const BenchCase& bench, double sample_rate, double seconds)
{
  BenchResult r;
  r.bench = bench;
  try {
    r.receptive_field = receptive_field(bench.config);
    r.rf_seconds = static_cast<double>(r.receptive_field) / sample_rate;
    r.params = param_count(bench.config);
    r.macs_per_sample = macs_per_sample(bench.config);

    EngineOptions options;
    options.dc_blocker = false;
    options.auto_gain = false;
    StreamEngine engine(bench.config, bench.block_size, sample_rate, options);

    const std::size_t n = bench.block_size;
    const auto blocks = static_cast<std::size_t>(std::ceil(seconds * sample_rate / static_cast<double>(n)));
    const AudioBuffer input =
      pink_noise(bench.config.in_channels, blocks * n, sample_rate, 0xBE7C4ull, db_to_gain(-18.0));
    AudioBuffer output(bench.config.out_channels, blocks * n, sample_rate);
    const ConstPlanar in = view(input);
    const MutablePlanar out = view(output);

    std::vector<double> per_block;
    per_block.reserve(blocks);
    const double block_seconds = static_cast<double>(n) / sample_rate;
    double total = 0.0;
    for (std::size_t b = 0; b < blocks; ++b) {
      const auto t0 = std::chrono::steady_clock::now();
      engine.process_block(ConstPlanar{in.data + b * n, in.stride, n, in.channels},
                           MutablePlanar{out.data + b * n, out.stride, n, out.channels});
      const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      total += dt;
      per_block.push_back(dt / block_seconds);
    }
    r.blocks = blocks;
    r.audio_seconds = static_cast<double>(blocks) * block_seconds;
    r.rtf_overall = total / r.audio_seconds;
    r.rtf_median = percentile(per_block, 0.5);
    r.rtf_p99 = percentile(per_block, 0.99);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::ConfigTooLarge)
      throw;
    r.skipped = true;
    r.skip_reason = e.what();
  }
  return r;
}

std::string bench_report_text(const std::vector<BenchResult>& results)
{
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-24s %6s %10s %8s %9s %8s %9s %9s %9s\n", "case", "block", "rf", "rf_s", "params",
                "macs", "rtf_med", "rtf_p99", "rtf_all");
  out << line;
  for (const auto& r : results) {
    if (r.skipped) {
      std::snprintf(line, sizeof line, "%-24s skipped: %s\n", r.bench.label.c_str(), r.skip_reason.c_str());
    } else {
      std::snprintf(line, sizeof line, "%-24s %6zu %10lld %8.3f %9lld %8lld %9.4f %9.4f %9.4f\n",
                    r.bench.label.c_str(), r.bench.block_size, static_cast<long long>(r.receptive_field),
                    r.rf_seconds, static_cast<long long>(r.params), static_cast<long long>(r.macs_per_sample),
                    r.rtf_median, r.rtf_p99, r.rtf_overall);
    }
    out << line;
  }
  return out.str();
}

std::string bench_report_csv(const std::vector<BenchResult>& results)
{
  std::ostringstream out;
  out << "label,depthwise,num_layers,kernel_size,dilation_growth,channel_width,block_size,skipped,rf_samples,rf_"
         "seconds,params,macs_per_sample,blocks,audio_seconds,rtf_median,rtf_p99,rtf_overall\n";
  for (const auto& r : results) {
    const auto& c = r.bench.config;
    out << r.bench.label << ',' << (c.depthwise ? 1 : 0) << ',' << c.num_layers << ',' << c.kernel_size << ','
        << c.dilation_growth << ',' << c.channel_width << ',' << r.bench.block_size << ',' << (r.skipped ? 1 : 0)
        << ',' << r.receptive_field << ',' << r.rf_seconds << ',' << r.params << ',' << r.macs_per_sample << ','
        << r.blocks << ',' << r.audio_seconds << ',' << r.rtf_median << ',' << r.rtf_p99 << ',' << r.rtf_overall
        << '\n';
  }
  return out.str();
}

} // namespace tcnfx
