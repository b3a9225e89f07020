#include "tcnfx/engine.hpp"

#include "tcnfx/error.hpp"
#include "tcnfx/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace tcnfx {

void GainSettings::validate() const
{
  if (!std::isfinite(input_db) || input_db < -120.0 || input_db > 40.0)
    throw Error(ErrorKind::InvalidConfig, "input_gain_db", "must lie in [-120, 40] dB");
  if (!std::isfinite(output_db) || output_db < -120.0 || output_db > 40.0)
    throw Error(ErrorKind::InvalidConfig, "output_gain_db", "must lie in [-120, 40] dB");
  if (!std::isfinite(mix) || mix < 0.0 || mix > 1.0)
    throw Error(ErrorKind::InvalidConfig, "mix", "must lie in [0, 1]");
}

DcBlocker::DcBlocker(int channels, double sample_rate, double cutoff_hz)
: coeff_(static_cast<float>(std::exp(-2.0 * std::numbers::pi * cutoff_hz / sample_rate)))
, x1_(static_cast<std::size_t>(channels), 0.0f)
, y1_(static_cast<std::size_t>(channels), 0.0f)
{
}

void DcBlocker::process(MutablePlanar buffer) noexcept
{
  const int chans = std::min<int>(buffer.channels, static_cast<int>(x1_.size()));
  for (int c = 0; c < chans; ++c) {
    float* x = buffer.channel(c);
    float x1 = x1_[static_cast<std::size_t>(c)];
    float y1 = y1_[static_cast<std::size_t>(c)];
    for (std::size_t t = 0; t < buffer.length; ++t) {
      const float y = x[t] - x1 + coeff_ * y1;
      x1 = x[t];
      y1 = y;
      x[t] = y;
    }
    x1_[static_cast<std::size_t>(c)] = x1;
    y1_[static_cast<std::size_t>(c)] = y1;
  }
}

void DcBlocker::reset() noexcept
{
  std::fill(x1_.begin(), x1_.end(), 0.0f);
  std::fill(y1_.begin(), y1_.end(), 0.0f);
}

Calibration calibrate(const Network& net, double sample_rate, bool dc_blocker)
{
  const auto length = static_cast<std::size_t>(std::llround(sample_rate));
  const auto history = static_cast<std::size_t>(net.receptive_field() - 1);
  const AudioBuffer noise =
    pink_noise(net.in_channels(), length, sample_rate, kCalibrationSeed, db_to_gain(kCalibrationRmsDb));

  AudioBuffer padded(net.in_channels(), history + length, sample_rate);
  for (int c = 0; c < net.in_channels(); ++c)
    std::copy(noise.channel(c).begin(), noise.channel(c).end(), padded.channel(c).begin() + history);

  AudioBuffer wet = forward(net, padded);
  if (dc_blocker) {
    DcBlocker dc(net.out_channels(), sample_rate);
    dc.process(view(wet));
  }

  Calibration cal;
  cal.input_rms = rms(noise);
  cal.wet_rms = rms(wet);
  const double lo = db_to_gain(-kMakeupLimitDb);
  const double hi = db_to_gain(kMakeupLimitDb);
  if (!std::isfinite(cal.wet_rms)) {
    cal.makeup = lo;
  } else if (cal.wet_rms <= 1e-12) {
    cal.makeup = 1.0;
    cal.dead = true;
  } else {
    cal.makeup = std::clamp(cal.input_rms / cal.wet_rms, lo, hi);
  }
  return cal;
}

struct StreamEngine::Slot {
  Network net;
  ForwardWorkspace workspace;
  LookbackBuffer history;
  std::vector<float> wet;
  Calibration calibration;
};

StreamEngine::StreamEngine(const NetworkConfig& config, std::size_t block_size, double sample_rate,
                           EngineOptions options)
: block_size_(block_size)
, sample_rate_(sample_rate)
, in_channels_(config.in_channels)
, out_channels_(config.out_channels)
, options_(options)
, fade_length_(std::max(options.crossfade_samples, block_size))
, last_requested_(config)
{
  if (block_size == 0)
    throw Error(ErrorKind::InvalidConfig, "block_size", "must be at least 1");
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate))
    throw Error(ErrorKind::InvalidConfig, "sample_rate", "must be positive");
  if (options.crossfade_samples == 0)
    fade_length_ = block_size;
  active_ = prepare(config);
  dc_ = DcBlocker(out_channels_, sample_rate_);
}

StreamEngine::~StreamEngine()
{
  delete queued_.exchange(nullptr);
  delete retired_.exchange(nullptr);
}

std::unique_ptr<StreamEngine::Slot> StreamEngine::prepare(const NetworkConfig& config) const
{
  const std::int64_t rf = tcnfx::receptive_field(config);
  const auto history = static_cast<std::size_t>(rf - 1);
  if (history + block_size_ > options_.memory_budget)
    throw Error(ErrorKind::ConfigTooLarge, "num_layers",
                "history of " + std::to_string(history) + " + block of " + std::to_string(block_size_) +
                  " samples exceeds the budget of " + std::to_string(options_.memory_budget));
  Network net = build_network(config);
  Calibration cal;
  if (options_.auto_gain)
    cal = calibrate(net, sample_rate_, options_.dc_blocker);
  ForwardWorkspace ws(net, history + block_size_);
  LookbackBuffer lb(config.in_channels, history, block_size_);
  std::vector<float> wet(static_cast<std::size_t>(config.out_channels) * block_size_);
  return std::make_unique<Slot>(Slot{std::move(net), std::move(ws), std::move(lb), std::move(wet), cal});
}

void StreamEngine::process_block(ConstPlanar in, MutablePlanar out)
{
  const std::size_t n = in.length;
  if (in.channels != in_channels_)
    throw Error(ErrorKind::ChannelMismatch, "in_channels",
                "engine expects " + std::to_string(in_channels_) + " input channels, got " +
                  std::to_string(in.channels));
  if (out.channels != out_channels_ || out.length != n)
    throw Error(ErrorKind::ChannelMismatch, "out_channels", "output view must match the input length and channels");
  if (n > block_size_)
    throw Error(ErrorKind::InvalidInput, "block_size",
                "block of " + std::to_string(n) + " exceeds the configured size " + std::to_string(block_size_));
  for (int c = 0; c < in.channels; ++c)
    for (std::size_t t = 0; t < n; ++t)
      if (!std::isfinite(in.channel(c)[t]))
        throw Error(ErrorKind::InvalidInput, "input", "non-finite sample");
  if (n == 0)
    return;

  if (!fading_)
    if (Slot* next = queued_.exchange(nullptr, std::memory_order_acq_rel))
      begin_fade(next);

  const auto in_target = static_cast<float>(db_to_gain(input_db_.load(std::memory_order_relaxed)));
  const auto out_target = static_cast<float>(db_to_gain(output_db_.load(std::memory_order_relaxed)));
  const auto mix_target = static_cast<float>(mix_.load(std::memory_order_relaxed));
  if (!primed_) {
    in_gain_ = in_target;
    out_gain_ = out_target;
    mix_now_ = mix_target;
    primed_ = true;
  }

  const ConstPlanar window = active_->history.push_ramped(in, in_gain_, in_target);
  MutablePlanar wet{active_->wet.data(), block_size_, n, out_channels_};
  forward_into(active_->net, window, active_->workspace, wet);
  const auto makeup = static_cast<float>(active_->calibration.makeup);

  if (fading_) {
    const ConstPlanar fwin = fading_->history.push_ramped(in, in_gain_, in_target);
    MutablePlanar incoming{fading_->wet.data(), block_size_, n, out_channels_};
    forward_into(fading_->net, fwin, fading_->workspace, incoming);
    const auto makeup_in = static_cast<float>(fading_->calibration.makeup);
    for (std::size_t t = 0; t < n; ++t) {
      const std::size_t pos = fade_pos_ + t + 1;
      float g_old = 0.0f;
      float g_new = 1.0f;
      if (pos < fade_length_) {
        const double theta = 0.5 * std::numbers::pi * static_cast<double>(pos) / static_cast<double>(fade_length_);
        g_old = static_cast<float>(std::cos(theta));
        g_new = static_cast<float>(std::sin(theta));
      }
      for (int c = 0; c < out_channels_; ++c)
        wet.channel(c)[t] = g_old * makeup * wet.channel(c)[t] + g_new * makeup_in * incoming.channel(c)[t];
    }
  } else if (makeup != 1.0f) {
    for (int c = 0; c < out_channels_; ++c)
      for (std::size_t t = 0; t < n; ++t)
        wet.channel(c)[t] *= makeup;
  }

  if (options_.dc_blocker)
    dc_.process(wet);

  const ConstPlanar dry = active_->history.recent(n);
  const float mix_step = (mix_target - mix_now_) / static_cast<float>(n);
  const float out_step = (out_target - out_gain_) / static_cast<float>(n);
  for (int c = 0; c < out_channels_; ++c) {
    const float* w = wet.channel(c);
    float* y = out.channel(c);
    const float* d0 = dry.channel(std::min(c, in_channels_ - 1));
    const float* d1 = dry.channel(in_channels_ - 1);
    const bool downmix = in_channels_ > out_channels_;
    for (std::size_t t = 0; t < n; ++t) {
      const float m = mix_target == mix_now_ ? mix_now_ : mix_now_ + mix_step * static_cast<float>(t + 1);
      const float g = out_target == out_gain_ ? out_gain_ : out_gain_ + out_step * static_cast<float>(t + 1);
      const float d = downmix ? 0.5f * (d0[t] + d1[t]) : d0[t];
      const float v = (m * w[t] + (1.0f - m) * d) * g;
      // Hard safety limit; NaN maps to silence.
      y[t] = v >= 1.0f ? 1.0f : v <= -1.0f ? -1.0f : v == v ? v : 0.0f;
    }
  }

  active_->history.advance(n);
  if (fading_) {
    fading_->history.advance(n);
    fade_pos_ += n;
    if (fade_pos_ >= fade_length_)
      finish_fade();
  }
  in_gain_ = in_target;
  out_gain_ = out_target;
  mix_now_ = mix_target;
}

AudioBuffer StreamEngine::process_block(const AudioBuffer& in)
{
  AudioBuffer out(out_channels_, in.length(), in.sample_rate());
  process_block(view(in), view(out));
  return out;
}

void StreamEngine::begin_fade(Slot* incoming) noexcept
{
  incoming->history.seed_from(active_->history);
  fading_.reset(incoming);
  fade_pos_ = 0;
}

void StreamEngine::finish_fade() noexcept
{
  Slot* old = active_.release();
  active_.reset(fading_.release());
  fade_pos_ = 0;
  retire(old);
}

void StreamEngine::retire(Slot* slot) noexcept
{
  Slot* expected = nullptr;
  if (!retired_.compare_exchange_strong(expected, slot, std::memory_order_acq_rel))
    delete slot; // previous retiree not collected yet
}

void StreamEngine::collect_retired() noexcept { delete retired_.exchange(nullptr, std::memory_order_acq_rel); }

void StreamEngine::swap_network(const NetworkConfig& config)
{
  config.validate();
  if (config.in_channels != in_channels_)
    throw Error(ErrorKind::ChannelMismatch, "in_channels", "cannot change the input channel count of a running engine");
  if (config.out_channels != out_channels_)
    throw Error(ErrorKind::ChannelMismatch, "out_channels",
                "cannot change the output channel count of a running engine");
  if (config == last_requested_)
    return;
  auto slot = prepare(config);
  collect_retired();
  delete queued_.exchange(slot.release(), std::memory_order_acq_rel);
  last_requested_ = config;
}

void StreamEngine::reset() noexcept
{
  if (fading_)
    finish_fade();
  active_->history.reset();
  dc_.reset();
  in_gain_ = static_cast<float>(db_to_gain(input_db_.load(std::memory_order_relaxed)));
  out_gain_ = static_cast<float>(db_to_gain(output_db_.load(std::memory_order_relaxed)));
  mix_now_ = static_cast<float>(mix_.load(std::memory_order_relaxed));
}

void StreamEngine::set_gains(const GainSettings& gains)
{
  gains.validate();
  input_db_.store(gains.input_db, std::memory_order_relaxed);
  output_db_.store(gains.output_db, std::memory_order_relaxed);
  mix_.store(gains.mix, std::memory_order_relaxed);
}

GainSettings StreamEngine::gains() const noexcept
{
  return {input_db_.load(std::memory_order_relaxed), output_db_.load(std::memory_order_relaxed),
          mix_.load(std::memory_order_relaxed)};
}

double StreamEngine::auto_gain() const noexcept { return active_->calibration.makeup; }

const Calibration& StreamEngine::calibration() const noexcept { return active_->calibration; }

const Network& StreamEngine::network() const noexcept { return active_->net; }

std::size_t StreamEngine::history_length() const noexcept { return active_->history.history(); }

std::size_t StreamEngine::history_allocation() const noexcept { return active_->history.allocated_per_channel(); }

} // namespace tcnfx
