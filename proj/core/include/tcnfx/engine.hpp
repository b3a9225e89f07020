#pragma once

#include "tcnfx/audio_buffer.hpp"
#include "tcnfx/config.hpp"
#include "tcnfx/lookback.hpp"
#include "tcnfx/network.hpp"

#include <atomic>
#include <cstddef>
#include <memory>
#include <vector>

namespace tcnfx {

struct GainSettings {
  double input_db = 0.0;
  double output_db = 0.0;
  double mix = 1.0; // 0 = dry only, 1 = wet only

  void validate() const;
  bool operator==(const GainSettings&) const = default;
};

struct EngineOptions {
  bool dc_blocker = true;
  /// Off only for tests that compare raw network output.
  bool auto_gain = true;
  std::size_t memory_budget = std::size_t{1} << 24; // samples per channel
  std::size_t crossfade_samples = 2048;
};

/// Result of the offline level calibration of one network.
struct Calibration {
  double makeup = 1.0;
  double input_rms = 0.0;
  double wet_rms = 0.0;
  bool dead = false;
};

inline constexpr double kCalibrationRmsDb = -18.0;
inline constexpr double kMakeupLimitDb = 40.0;
inline constexpr double kDcBlockerHz = 10.0;
inline constexpr std::uint64_t kCalibrationSeed = 0x5EED'CA11'B4A7'E000ull;

/// First-order 10 Hz high-pass, y[n] = x[n] - x[n-1] + R * y[n-1].
class DcBlocker {
public:
  DcBlocker() = default;
  DcBlocker(int channels, double sample_rate, double cutoff_hz = kDcBlockerHz);

  void process(MutablePlanar buffer) noexcept;
  void reset() noexcept;

private:
  float coeff_ = 0.0f;
  std::vector<float> x1_;
  std::vector<float> y1_;
};

/// Runs one second of seeded pink noise at -18 dBFS RMS (with RF - 1 zeros
/// of history) through the network and the optional DC blocker, and returns
/// makeup = input RMS / wet RMS clamped to +-40 dB. A silent network gets
/// makeup 1 and `dead = true`.
Calibration calibrate(const Network& net, double sample_rate, bool dc_blocker);

/// Block-based real-time processor around a Network.
///
/// The audio path (process_block, reset) must be driven by one thread.
/// swap_network may be called from any other single control thread; it
/// builds the new network there and hands it over with one atomic exchange
/// that the audio path picks up at the next block boundary.
class StreamEngine {
public:
  StreamEngine(const NetworkConfig& config, std::size_t block_size, double sample_rate, EngineOptions options = {});
  ~StreamEngine();

  StreamEngine(const StreamEngine&) = delete;
  StreamEngine& operator=(const StreamEngine&) = delete;

  /// Processes n <= block_size samples per channel into `out`, which must
  /// have out_channels() channels of the same length. Does not allocate.
  void process_block(ConstPlanar in, MutablePlanar out);

  /// Allocating form for offline use.
  AudioBuffer process_block(const AudioBuffer& in);

  /// Builds `config` and queues it for an equal-power crossfade. A request
  /// for the most recently requested config is a no-op; a request made
  /// while another is still queued replaces it. Throws (leaving the engine
  /// untouched) on invalid or oversized configs or a channel-count change.
  void swap_network(const NetworkConfig& config);

  /// Zeroes history and DC-blocker state and completes any crossfade
  /// immediately. Gains and queued swaps are kept.
  void reset() noexcept;

  void set_gains(const GainSettings& gains);
  GainSettings gains() const noexcept;

  /// Makeup factor of the active network.
  double auto_gain() const noexcept;
  const Calibration& calibration() const noexcept;
  bool dead_network() const noexcept { return calibration().dead; }

  const Network& network() const noexcept;
  const NetworkConfig& config() const noexcept { return network().config(); }
  std::int64_t receptive_field() const noexcept { return network().receptive_field(); }
  std::size_t history_length() const noexcept;
  std::size_t history_allocation() const noexcept;
  std::size_t block_size() const noexcept { return block_size_; }
  double sample_rate() const noexcept { return sample_rate_; }
  int in_channels() const noexcept { return in_channels_; }
  int out_channels() const noexcept { return out_channels_; }
  const EngineOptions& options() const noexcept { return options_; }

  bool crossfading() const noexcept { return fading_ != nullptr; }
  bool swap_queued() const noexcept { return queued_.load(std::memory_order_acquire) != nullptr; }
  std::size_t crossfade_length() const noexcept { return fade_length_; }

  /// Frees networks retired by the audio path. Called by swap_network; the
  /// control thread may also call it directly.
  void collect_retired() noexcept;

private:
  struct Slot;

  std::unique_ptr<Slot> prepare(const NetworkConfig& config) const;
  void begin_fade(Slot* incoming) noexcept;
  void finish_fade() noexcept;
  void retire(Slot* slot) noexcept;

  std::size_t block_size_;
  double sample_rate_;
  int in_channels_;
  int out_channels_;
  EngineOptions options_;
  std::size_t fade_length_;

  std::unique_ptr<Slot> active_;
  std::unique_ptr<Slot> fading_;
  std::size_t fade_pos_ = 0;
  std::atomic<Slot*> queued_{nullptr};
  std::atomic<Slot*> retired_{nullptr};

  NetworkConfig last_requested_;

  std::atomic<double> input_db_{0.0};
  std::atomic<double> output_db_{0.0};
  std::atomic<double> mix_{1.0};
  float in_gain_ = 1.0f;
  float out_gain_ = 1.0f;
  float mix_now_ = 1.0f;
  bool primed_ = false;

  DcBlocker dc_;
};

} // namespace tcnfx
