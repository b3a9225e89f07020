#include "tcnfx/config.hpp"

#include "tcnfx/error.hpp"

#include <array>
#include <cmath>
#include <string>

namespace tcnfx {

namespace {

constexpr std::array<std::pair<Activation, std::string_view>, 6> kActivationNames{{
  {Activation::Linear, "linear"},
  {Activation::ReLU, "relu"},
  {Activation::Tanh, "tanh"},
  {Activation::Sigmoid, "sigmoid"},
  {Activation::SoftSign, "softsign"},
  {Activation::LeakyReLU, "leaky_relu"},
}};

constexpr std::array<std::pair<InitKind, std::string_view>, 4> kInitNames{{
  {InitKind::NormalStd, "normal"},
  {InitKind::Uniform, "uniform"},
  {InitKind::GlorotUniform, "glorot_uniform"},
  {InitKind::HeNormal, "he_normal"},
}};

void require_range(std::string_view field, long long value, long long lo, long long hi)
{
  if (value < lo || value > hi)
    throw Error(ErrorKind::InvalidConfig, std::string(field),
                "value " + std::to_string(value) + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

// Channel routing shared by the plan and the counting helpers; independent of
// dilation so it is valid even when the receptive field overflows.
struct Routing {
  int in_ch;
  int out_ch;
  bool depthwise;
};

Routing route(const NetworkConfig& c, int l)
{
  const int last = c.num_layers - 1;
  const int in = l == 0 ? c.in_channels : c.channel_width;
  const int out = l == last ? c.out_channels : c.channel_width;
  const bool hidden = l > 0 && l < last;
  return {in, out, c.depthwise && hidden};
}

} // namespace

std::string_view to_string(Activation a) noexcept
{
  for (const auto& [value, name] : kActivationNames)
    if (value == a)
      return name;
  return "linear";
}

std::optional<Activation> parse_activation(std::string_view name) noexcept
{
  for (const auto& [value, n] : kActivationNames)
    if (n == name)
      return value;
  return std::nullopt;
}

std::string_view to_string(InitKind k) noexcept
{
  for (const auto& [value, name] : kInitNames)
    if (value == k)
      return name;
  return "normal";
}

std::optional<InitKind> parse_init_kind(std::string_view name) noexcept
{
  for (const auto& [value, n] : kInitNames)
    if (n == name)
      return value;
  return std::nullopt;
}

InitScheme InitScheme::with_default(InitKind kind)
{
  switch (kind) {
  case InitKind::NormalStd: return normal();
  case InitKind::Uniform: return uniform();
  case InitKind::GlorotUniform: return glorot_uniform();
  case InitKind::HeNormal: return he_normal();
  }
  return normal();
}

void NetworkConfig::validate() const
{
  require_range("num_layers", num_layers, 1, ConfigLimits::kMaxLayers);
  require_range("kernel_size", kernel_size, 1, ConfigLimits::kMaxKernel);
  require_range("dilation_growth", dilation_growth, 1, ConfigLimits::kMaxDilationGrowth);
  require_range("channel_width", channel_width, 1, ConfigLimits::kMaxChannelWidth);
  require_range("in_channels", in_channels, 1, ConfigLimits::kMaxIoChannels);
  require_range("out_channels", out_channels, 1, ConfigLimits::kMaxIoChannels);
  if (!std::isfinite(init.param) || init.param < 0.0)
    throw Error(ErrorKind::InvalidConfig, "init_param", "must be finite and non-negative");
}

std::int64_t LayerSpec::weight_count() const noexcept
{
  return depthwise ? static_cast<std::int64_t>(out_ch) * kernel_size
                   : static_cast<std::int64_t>(out_ch) * in_ch * kernel_size;
}

std::int64_t receptive_field(const NetworkConfig& config)
{
  config.validate();
  const std::int64_t limit = ConfigLimits::kMaxReceptiveField;
  const std::int64_t taps = config.kernel_size - 1;
  std::int64_t rf = 1;
  std::int64_t dilation = 1;
  for (int l = 0; l < config.num_layers; ++l) {
    // Grows monotonically, so checking against the limit before each step
    // keeps every intermediate inside int64.
    rf += taps * dilation;
    if (rf > limit)
      throw Error(ErrorKind::ConfigTooLarge, "num_layers",
                  "receptive field exceeds " + std::to_string(limit) + " samples");
    if (l + 1 < config.num_layers) {
      dilation *= config.dilation_growth;
      if (taps > 0 && dilation > limit)
        throw Error(ErrorKind::ConfigTooLarge, "dilation_growth",
                    "receptive field exceeds " + std::to_string(limit) + " samples");
      if (taps == 0 && dilation > limit)
        dilation = limit; // 1-tap layers ignore dilation; clamp to stay finite
    }
  }
  return rf;
}

std::vector<LayerSpec> derive_layer_plan(const NetworkConfig& config)
{
  receptive_field(config); // validates and rejects overflowing dilations
  std::vector<LayerSpec> plan;
  plan.reserve(static_cast<std::size_t>(config.num_layers));
  std::int64_t dilation = 1;
  for (int l = 0; l < config.num_layers; ++l) {
    const Routing r = route(config, l);
    plan.push_back(LayerSpec{l, r.in_ch, r.out_ch, config.kernel_size, dilation, r.depthwise, config.use_bias});
    if (l + 1 < config.num_layers)
      dilation = std::min<std::int64_t>(dilation * config.dilation_growth, ConfigLimits::kMaxReceptiveField);
  }
  return plan;
}

std::int64_t param_count(const NetworkConfig& config)
{
  config.validate();
  std::int64_t total = 0;
  for (int l = 0; l < config.num_layers; ++l) {
    const Routing r = route(config, l);
    const LayerSpec spec{l, r.in_ch, r.out_ch, config.kernel_size, 1, r.depthwise, config.use_bias};
    total += spec.weight_count() + spec.bias_count();
  }
  return total;
}

std::int64_t macs_per_sample(const NetworkConfig& config)
{
  config.validate();
  std::int64_t total = 0;
  for (int l = 0; l < config.num_layers; ++l) {
    const Routing r = route(config, l);
    const LayerSpec spec{l, r.in_ch, r.out_ch, config.kernel_size, 1, r.depthwise, false};
    total += spec.weight_count();
  }
  return total;
}

} // namespace tcnfx
