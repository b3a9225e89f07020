#include "tcnfx/describe.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace tcnfx {

std::string format_rf_ms(std::int64_t rf_samples, double sample_rate)
{
  const double ms = static_cast<double>(rf_samples) / sample_rate * 1000.0;
  char buf[64];
  if (ms >= 100.0)
    std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(std::llround(ms)));
  else if (ms >= 10.0)
    std::snprintf(buf, sizeof buf, "%.1f", ms);
  else
    std::snprintf(buf, sizeof buf, "%.2f", ms);
  return buf;
}

Indicators indicators(const NetworkConfig& config, double sample_rate)
{
  const std::int64_t rf = receptive_field(config);
  return {rf, format_rf_ms(rf, sample_rate), param_count(config), config.seed};
}

std::string describe(const NetworkConfig& config, double sample_rate)
{
  const Indicators ind = indicators(config, sample_rate);
  std::ostringstream out;
  out << "receptive field: " << ind.rf_samples << " samples (" << ind.rf_ms << " ms at " << sample_rate << " Hz)\n";
  out << "parameters:      " << ind.params << '\n';
  out << "seed:            " << ind.seed << '\n';
  out << "activation:      " << to_string(config.activation) << '\n';
  out << "init:            " << to_string(config.init.kind);
  if (config.init.kind == InitKind::NormalStd || config.init.kind == InitKind::Uniform)
    out << " (" << config.init.param << ')';
  out << '\n';
  out << "layer  in_ch  out_ch  kernel  dilation  depthwise\n";
  char line[128];
  for (const auto& s : derive_layer_plan(config)) {
    std::snprintf(line, sizeof line, "%5d  %5d  %6d  %6d  %8lld  %s\n", s.layer_index, s.in_ch, s.out_ch, s.kernel_size,
                  static_cast<long long>(s.dilation), s.depthwise ? "yes" : "no");
    out << line;
  }
  return out.str();
}

} // namespace tcnfx
