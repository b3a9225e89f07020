#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace tcnfx {

enum class Activation { Linear, ReLU, Tanh, Sigmoid, SoftSign, LeakyReLU };

inline constexpr float kLeakyReluSlope = 0.2f;

std::string_view to_string(Activation a) noexcept;
std::optional<Activation> parse_activation(std::string_view name) noexcept;

enum class InitKind { NormalStd, Uniform, GlorotUniform, HeNormal };

std::string_view to_string(InitKind k) noexcept;
std::optional<InitKind> parse_init_kind(std::string_view name) noexcept;

/// Weight distribution. `param` is the standard deviation for NormalStd and
/// the half-width for Uniform; the fan-based schemes ignore it.
struct InitScheme {
  InitKind kind = InitKind::NormalStd;
  double param = 0.4;

  static constexpr double kDefaultNormalStd = 0.4;
  static constexpr double kDefaultUniformBound = 1.0;
  static constexpr double kBiasBound = 0.1;

  static InitScheme normal(double stddev = kDefaultNormalStd) { return {InitKind::NormalStd, stddev}; }
  static InitScheme uniform(double bound = kDefaultUniformBound) { return {InitKind::Uniform, bound}; }
  static InitScheme glorot_uniform() { return {InitKind::GlorotUniform, 0.0}; }
  static InitScheme he_normal() { return {InitKind::HeNormal, 0.0}; }

  /// Default parameter for a scheme picked by name.
  static InitScheme with_default(InitKind kind);

  bool operator==(const InitScheme&) const = default;
};

struct ConfigLimits {
  static constexpr int kMaxLayers = 64;
  static constexpr int kMaxKernel = 64;
  static constexpr int kMaxDilationGrowth = 16;
  static constexpr int kMaxChannelWidth = 256;
  static constexpr int kMaxIoChannels = 2;
  static constexpr std::int64_t kMaxReceptiveField = std::int64_t{1} << 31;
};

/// Complete architectural description of one random network. Two equal
/// configs always build bit-identical networks.
struct NetworkConfig {
  int num_layers = 3;
  int kernel_size = 3;
  int dilation_growth = 2;
  int channel_width = 8;
  int in_channels = 1;
  int out_channels = 1;
  Activation activation = Activation::Tanh;
  InitScheme init = InitScheme::normal();
  bool depthwise = false;
  bool use_bias = false;
  std::uint64_t seed = 0;

  /// Throws Error(InvalidConfig) naming the first out-of-range field.
  void validate() const;

  bool operator==(const NetworkConfig&) const = default;
};

struct LayerSpec {
  int layer_index = 0;
  int in_ch = 1;
  int out_ch = 1;
  int kernel_size = 1;
  std::int64_t dilation = 1;
  bool depthwise = false;
  bool bias = false;

  /// Samples consumed beyond the output length: (k - 1) * dilation.
  std::int64_t span() const noexcept { return static_cast<std::int64_t>(kernel_size - 1) * dilation; }
  std::int64_t weight_count() const noexcept;
  std::int64_t bias_count() const noexcept { return bias ? out_ch : 0; }

  bool operator==(const LayerSpec&) const = default;
};

/// 1 + (k - 1) * sum_{l < L} g^l. Throws ConfigTooLarge past 2^31 samples.
std::int64_t receptive_field(const NetworkConfig& config);

/// Dense mode: in -> c, c -> c, ..., c -> out. Depthwise mode keeps the
/// entry and exit layers dense and makes every hidden c -> c layer depthwise.
std::vector<LayerSpec> derive_layer_plan(const NetworkConfig& config);

std::int64_t param_count(const NetworkConfig& config);

/// Multiply-accumulates per output sample, summed over layers.
std::int64_t macs_per_sample(const NetworkConfig& config);

} // namespace tcnfx
