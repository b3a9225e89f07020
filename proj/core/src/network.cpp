#include "tcnfx/network.hpp"

#include "tcnfx/error.hpp"
#include "tcnfx/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tcnfx {

namespace {

// Output samples processed per pass; keeps the accumulator row in L1.
constexpr std::size_t kTile = 1024;

// Hot loops get an AVX2 clone picked at load time. No FMA in the clone, so
// both versions produce identical bits.
#if defined(__GNUC__) && !defined(__clang__) && defined(__x86_64__) && defined(__ELF__)
#define TCNFX_HOT __attribute__((target_clones("avx2", "default")))
#else
#define TCNFX_HOT
#endif

// Casting a double draw to float can round past a bound that holds in double.
float to_float_within(double v, double bound)
{
  float f = static_cast<float>(v);
  const auto fb = static_cast<double>(std::abs(f));
  if (fb > bound)
    f = std::nextafter(f, 0.0f);
  return f;
}

void fill_weights(const LayerSpec& spec, const InitScheme& init, std::uint64_t seed, std::vector<float>& w)
{
  // Fans follow the tensor shape: [out][in][k] dense, [ch][1][k] depthwise.
  const double k = spec.kernel_size;
  const double fan_in = (spec.depthwise ? 1.0 : static_cast<double>(spec.in_ch)) * k;
  const double fan_out = static_cast<double>(spec.out_ch) * k;
  SplitMix64 rng(stream_key(seed, static_cast<std::uint64_t>(spec.layer_index), StreamRole::Weight));
  switch (init.kind) {
  case InitKind::NormalStd:
    for (auto& v : w)
      v = static_cast<float>(init.param * rng.normal());
    break;
  case InitKind::Uniform:
    for (auto& v : w)
      v = to_float_within(rng.uniform(-init.param, init.param), init.param);
    break;
  case InitKind::GlorotUniform: {
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    for (auto& v : w)
      v = to_float_within(rng.uniform(-bound, bound), bound);
    break;
  }
  case InitKind::HeNormal: {
    const double stddev = std::sqrt(2.0 / fan_in);
    for (auto& v : w)
      v = static_cast<float>(stddev * rng.normal());
    break;
  }
  }
}

// Odd 13/6 rational fit of tanh on [-7.905, 7.905]; saturates to +-1
// beyond. Max abs error 4e-7. Branch-free so the span loops vectorize, and
// libm-independent so every platform produces the same bits.
inline float tanh_rational(float x) noexcept
{
  constexpr float kClamp = 7.90531110763549805f;
  x = x < -kClamp ? -kClamp : x;
  x = x > kClamp ? kClamp : x;
  const float x2 = x * x;
  float p = -2.76076847742355e-16f;
  p = p * x2 + 2.00018790482477e-13f;
  p = p * x2 + -8.60467152213735e-11f;
  p = p * x2 + 5.12229709037114e-08f;
  p = p * x2 + 1.48572235717979e-05f;
  p = p * x2 + 6.37261928875436e-04f;
  p = p * x2 + 4.89352455891786e-03f;
  p = p * x;
  float q = 1.19825839466702e-06f;
  q = q * x2 + 1.18534705686654e-04f;
  q = q * x2 + 2.26843463243900e-03f;
  q = q * x2 + 4.89352518554385e-03f;
  return p / q;
}

inline float sigmoid_rational(float x) noexcept { return 0.5f + 0.5f * tanh_rational(0.5f * x); }

inline void activate(Activation a, std::span<float> values) noexcept
{
  switch (a) {
  case Activation::Linear: return;
  case Activation::ReLU:
    for (auto& v : values)
      v = v > 0.0f ? v : 0.0f;
    return;
  case Activation::LeakyReLU:
    for (auto& v : values)
      v = v > 0.0f ? v : kLeakyReluSlope * v;
    return;
  case Activation::Tanh:
    for (auto& v : values)
      v = tanh_rational(v);
    return;
  case Activation::Sigmoid:
    for (auto& v : values)
      v = sigmoid_rational(v);
    return;
  case Activation::SoftSign:
    for (auto& v : values)
      v = v / (1.0f + std::abs(v));
    return;
  }
}

TCNFX_HOT void conv_dense(const Layer& layer, ConstPlanar in, MutablePlanar out, Activation act)
{
  const auto& s = layer.spec;
  const std::size_t k = static_cast<std::size_t>(s.kernel_size);
  const auto d = static_cast<std::size_t>(s.dilation);
  const std::size_t n = out.length;
  for (std::size_t t0 = 0; t0 < n; t0 += kTile) {
    const std::size_t len = std::min(kTile, n - t0);
    for (int o = 0; o < s.out_ch; ++o) {
      float* acc = out.channel(o) + t0;
      std::fill(acc, acc + len, s.bias ? layer.biases[static_cast<std::size_t>(o)] : 0.0f);
      const float* w = layer.weights.data() + static_cast<std::size_t>(o) * static_cast<std::size_t>(s.in_ch) * k;
      for (int i = 0; i < s.in_ch; ++i) {
        const float* x = in.channel(i) + t0;
        for (std::size_t j = 0; j < k; ++j) {
          const float wj = w[static_cast<std::size_t>(i) * k + j];
          const float* xj = x + j * d;
          for (std::size_t t = 0; t < len; ++t)
            acc[t] += wj * xj[t];
        }
      }
      activate(act, std::span<float>(acc, len));
    }
  }
}

TCNFX_HOT void conv_depthwise(const Layer& layer, ConstPlanar in, MutablePlanar out, Activation act)
{
  const auto& s = layer.spec;
  const std::size_t k = static_cast<std::size_t>(s.kernel_size);
  const auto d = static_cast<std::size_t>(s.dilation);
  const std::size_t n = out.length;
  for (std::size_t t0 = 0; t0 < n; t0 += kTile) {
    const std::size_t len = std::min(kTile, n - t0);
    for (int c = 0; c < s.out_ch; ++c) {
      float* acc = out.channel(c) + t0;
      std::fill(acc, acc + len, s.bias ? layer.biases[static_cast<std::size_t>(c)] : 0.0f);
      const float* w = layer.weights.data() + static_cast<std::size_t>(c) * k;
      const float* x = in.channel(c) + t0;
      for (std::size_t j = 0; j < k; ++j) {
        const float wj = w[j];
        const float* xj = x + j * d;
        for (std::size_t t = 0; t < len; ++t)
          acc[t] += wj * xj[t];
      }
      activate(act, std::span<float>(acc, len));
    }
  }
}

void check_layer_shapes(const Layer& layer)
{
  const auto& s = layer.spec;
  if (layer.weights.size() != static_cast<std::size_t>(s.weight_count()))
    throw Error(ErrorKind::InvalidConfig, "weights",
                "layer " + std::to_string(s.layer_index) + " expects " + std::to_string(s.weight_count()) +
                  " weights, got " + std::to_string(layer.weights.size()));
  if (layer.biases.size() != static_cast<std::size_t>(s.bias_count()))
    throw Error(ErrorKind::InvalidConfig, "biases",
                "layer " + std::to_string(s.layer_index) + " expects " + std::to_string(s.bias_count()) +
                  " biases, got " + std::to_string(layer.biases.size()));
}

} // namespace

bool operator==(const Layer& a, const Layer& b)
{
  return a.spec == b.spec && a.weights == b.weights && a.biases == b.biases;
}

Network::Network(NetworkConfig config, std::vector<Layer> layers, std::int64_t rf)
: config_(std::move(config))
, layers_(std::move(layers))
, receptive_field_(rf)
{
}

int Network::max_width() const noexcept
{
  int width = 0;
  for (const auto& l : layers_)
    width = std::max(width, l.spec.out_ch);
  return width;
}

std::int64_t Network::allocated_scalars() const noexcept
{
  std::int64_t total = 0;
  for (const auto& l : layers_)
    total += static_cast<std::int64_t>(l.weights.size() + l.biases.size());
  return total;
}

bool Network::operator==(const Network& other) const
{
  return config_ == other.config_ && receptive_field_ == other.receptive_field_ && layers_ == other.layers_;
}

Network Network::from_layers(const NetworkConfig& config, std::vector<Layer> layers)
{
  const auto plan = derive_layer_plan(config);
  if (layers.size() != plan.size())
    throw Error(ErrorKind::InvalidConfig, "layers",
                "expected " + std::to_string(plan.size()) + " layers, got " + std::to_string(layers.size()));
  for (std::size_t l = 0; l < plan.size(); ++l) {
    if (!(layers[l].spec == plan[l]))
      throw Error(ErrorKind::InvalidConfig, "layers", "layer " + std::to_string(l) + " spec does not match plan");
    check_layer_shapes(layers[l]);
    for (float v : layers[l].weights)
      if (!std::isfinite(v))
        throw Error(ErrorKind::InvalidInput, "weights", "non-finite weight");
  }
  return Network(config, std::move(layers), tcnfx::receptive_field(config));
}

Network build_network(const NetworkConfig& config)
{
  const auto plan = derive_layer_plan(config);
  std::vector<Layer> layers;
  layers.reserve(plan.size());
  for (const auto& spec : plan) {
    Layer layer{spec, std::vector<float>(static_cast<std::size_t>(spec.weight_count())), {}};
    fill_weights(spec, config.init, config.seed, layer.weights);
    if (spec.bias) {
      layer.biases.resize(static_cast<std::size_t>(spec.bias_count()));
      SplitMix64 rng(stream_key(config.seed, static_cast<std::uint64_t>(spec.layer_index), StreamRole::Bias));
      for (auto& b : layer.biases)
        b = to_float_within(rng.uniform(-InitScheme::kBiasBound, InitScheme::kBiasBound), InitScheme::kBiasBound);
    }
    layers.push_back(std::move(layer));
  }
  return Network(config, std::move(layers), tcnfx::receptive_field(config));
}


float apply_activation(Activation a, float x) noexcept
{
  switch (a) {
  case Activation::Linear: return x;
  case Activation::ReLU: return x > 0.0f ? x : 0.0f;
  case Activation::Tanh: return tanh_rational(x);
  case Activation::Sigmoid: return sigmoid_rational(x);
  case Activation::SoftSign: return x / (1.0f + std::abs(x));
  case Activation::LeakyReLU: return x > 0.0f ? x : kLeakyReluSlope * x;
  }
  return x;
}

void apply_activation(Activation a, std::span<float> values) noexcept { activate(a, values); }

namespace {

// Convolution followed by the activation, applied per tile while it is in cache.
void conv_activate(const Layer& layer, ConstPlanar in, MutablePlanar out, Activation act)
{
  const auto& s = layer.spec;
  const auto span = static_cast<std::size_t>(s.span());
  if (in.channels != s.in_ch || out.channels != s.out_ch)
    throw Error(ErrorKind::ChannelMismatch, "channels", "layer " + std::to_string(s.layer_index) + " channel mismatch");
  if (in.length < span + 1)
    throw Error(ErrorKind::InsufficientContext, "input",
                "layer " + std::to_string(s.layer_index) + " needs at least " + std::to_string(span + 1) +
                  " samples, got " + std::to_string(in.length));
  if (out.length != in.length - span)
    throw Error(ErrorKind::InvalidInput, "output", "output length must equal input length minus kernel span");
  if (s.depthwise)
    conv_depthwise(layer, in, out, act);
  else
    conv_dense(layer, in, out, act);
}

} // namespace

void conv1d_causal(const Layer& layer, ConstPlanar in, MutablePlanar out)
{
  conv_activate(layer, in, out, Activation::Linear);
}

AudioBuffer conv1d_causal(const Layer& layer, const AudioBuffer& input)
{
  const auto span = static_cast<std::size_t>(layer.spec.span());
  if (input.length() < span + 1)
    throw Error(ErrorKind::InsufficientContext, "input",
                "layer needs at least " + std::to_string(span + 1) + " samples, got " + std::to_string(input.length()));
  AudioBuffer out(layer.spec.out_ch, input.length() - span, input.sample_rate());
  conv1d_causal(layer, view(input), view(out));
  return out;
}

ForwardWorkspace::ForwardWorkspace(const Network& net, std::size_t max_input_length)
: capacity_(max_input_length)
, width_(net.max_width())
, ping_(static_cast<std::size_t>(width_) * max_input_length)
, pong_(static_cast<std::size_t>(width_) * max_input_length)
{
}

void forward_into(const Network& net, ConstPlanar in, ForwardWorkspace& ws, MutablePlanar out)
{
  const auto rf = static_cast<std::size_t>(net.receptive_field());
  if (in.channels != net.in_channels())
    throw Error(ErrorKind::ChannelMismatch, "in_channels",
                "network expects " + std::to_string(net.in_channels()) + " channels, got " +
                  std::to_string(in.channels));
  if (in.length < rf)
    throw Error(ErrorKind::InsufficientContext, "input",
                "input of " + std::to_string(in.length) + " samples is shorter than the receptive field of " +
                  std::to_string(rf));
  if (out.channels != net.out_channels() || out.length != in.length - rf + 1)
    throw Error(ErrorKind::InvalidInput, "output", "output view has the wrong shape");
  const auto layers = net.layers();
  if (layers.size() > 1 && (in.length > ws.capacity_ || ws.width_ < net.max_width()))
    throw Error(ErrorKind::InvalidInput, "workspace", "workspace too small for input");

  const Activation act = net.config().activation;
  ConstPlanar src = in;
  bool use_ping = true;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& spec = layers[l].spec;
    const std::size_t len = src.length - static_cast<std::size_t>(spec.span());
    MutablePlanar dst = out;
    if (l + 1 < layers.size()) {
      auto& buf = use_ping ? ws.ping_ : ws.pong_;
      dst = MutablePlanar{buf.data(), ws.capacity_, len, spec.out_ch};
      use_ping = !use_ping;
    }
    conv_activate(layers[l], src, dst, act);
    src = ConstPlanar{dst.data, dst.stride, dst.length, dst.channels};
  }
}

AudioBuffer forward(const Network& net, const AudioBuffer& input)
{
  input.require_finite("input");
  const auto rf = static_cast<std::size_t>(net.receptive_field());
  if (input.channels() != net.in_channels())
    throw Error(ErrorKind::ChannelMismatch, "in_channels",
                "network expects " + std::to_string(net.in_channels()) + " channels, got " +
                  std::to_string(input.channels()));
  if (input.length() < rf)
    throw Error(ErrorKind::InsufficientContext, "input",
                "input of " + std::to_string(input.length()) + " samples is shorter than the receptive field of " +
                  std::to_string(rf));
  ForwardWorkspace ws(net, input.length());
  AudioBuffer out(net.out_channels(), input.length() - rf + 1, input.sample_rate());
  forward_into(net, view(input), ws, view(out));
  return out;
}

} // namespace tcnfx
