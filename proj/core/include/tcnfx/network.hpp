#pragma once

#include "tcnfx/audio_buffer.hpp"
#include "tcnfx/config.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace tcnfx {

/// Non-owning planar view: channel c starts at data + c * stride.
template <typename T>
struct PlanarView {
  T* data = nullptr;
  std::size_t stride = 0;
  std::size_t length = 0;
  int channels = 0;

  T* channel(int c) const noexcept { return data + static_cast<std::size_t>(c) * stride; }
};

using ConstPlanar = PlanarView<const float>;
using MutablePlanar = PlanarView<float>;

inline ConstPlanar view(const AudioBuffer& b) noexcept
{
  return {b.samples().data(), b.length(), b.length(), b.channels()};
}
inline MutablePlanar view(AudioBuffer& b) noexcept { return {b.samples().data(), b.length(), b.length(), b.channels()}; }

/// One conv + activation block with its concrete tensors.
/// Dense weights are laid out [out][in][tap], depthwise weights [ch][tap];
/// tap 0 multiplies the oldest sample of the window.
struct Layer {
  LayerSpec spec;
  std::vector<float> weights;
  std::vector<float> biases; // empty when spec.bias is false
};

/// Immutable randomly weighted TCN.
class Network {
public:
  const NetworkConfig& config() const noexcept { return config_; }
  std::span<const Layer> layers() const noexcept { return layers_; }
  std::int64_t receptive_field() const noexcept { return receptive_field_; }
  int in_channels() const noexcept { return config_.in_channels; }
  int out_channels() const noexcept { return config_.out_channels; }

  /// Widest channel count of any layer output; sizes the forward scratch.
  int max_width() const noexcept;

  /// Number of float scalars held in weight and bias tensors.
  std::int64_t allocated_scalars() const noexcept;

  /// Takes explicit tensors instead of drawing them. Shapes must match
  /// derive_layer_plan(config) exactly.
  static Network from_layers(const NetworkConfig& config, std::vector<Layer> layers);

  bool operator==(const Network&) const;

private:
  friend Network build_network(const NetworkConfig& config);
  Network(NetworkConfig config, std::vector<Layer> layers, std::int64_t rf);

  NetworkConfig config_;
  std::vector<Layer> layers_;
  std::int64_t receptive_field_ = 1;
};

bool operator==(const Layer& a, const Layer& b);

/// Draws every tensor from config.init using SplitMix64 streams keyed by
/// (seed, layer index, weight|bias).
Network build_network(const NetworkConfig& config);

float apply_activation(Activation a, float x) noexcept;
void apply_activation(Activation a, std::span<float> values) noexcept;

/// Valid causal cross-correlation of one layer,
/// out[o][t] = b[o] + sum_i sum_j w[o][i][j] * x[i][t + j * dilation],
/// with no activation. `out.length` must equal in.length - spec.span().
void conv1d_causal(const Layer& layer, ConstPlanar in, MutablePlanar out);

/// Allocating convenience form; throws InsufficientContext on short input.
AudioBuffer conv1d_causal(const Layer& layer, const AudioBuffer& input);

/// Scratch for forward_into. Reused across calls without reallocating.
class ForwardWorkspace {
public:
  ForwardWorkspace() = default;
  ForwardWorkspace(const Network& net, std::size_t max_input_length);

  std::size_t capacity() const noexcept { return capacity_; }

private:
  friend void forward_into(const Network&, ConstPlanar, ForwardWorkspace&, MutablePlanar);
  std::size_t capacity_ = 0;
  int width_ = 0;
  std::vector<float> ping_;
  std::vector<float> pong_;
};

/// Non-allocating forward pass. `out.length` must be in.length - RF + 1 and
/// in.length must not exceed the workspace capacity. No input validation
/// beyond shape checks.
void forward_into(const Network& net, ConstPlanar in, ForwardWorkspace& ws, MutablePlanar out);

/// Full forward pass: output length = input length - RF + 1.
AudioBuffer forward(const Network& net, const AudioBuffer& input);

} // namespace tcnfx
