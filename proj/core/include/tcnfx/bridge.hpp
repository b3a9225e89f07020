#pragma once

#include "tcnfx/engine.hpp"
#include "tcnfx/preset.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace tcnfx {

inline constexpr int kBridgeProtocolVersion = 1;

struct BridgeOptions {
  std::size_t block_size = 512;
  double sample_rate = 44100.0;
  std::size_t max_sessions = 16;
};

/// Control-surface protocol. Each frame is one JSON object with a "type":
///
///   hello                                 -> hello{session, protocol, engine}
///   set_config{session, config{...}}      -> indicators{rf_samples, rf_ms, params, seed}
///   audio_block{session, n, channels,
///               samples: base64 LE f32}  -> audio_block{session, n, channels, samples}
///   anything malformed                    -> error{field, reason}
///
/// `config` uses preset keys; missing keys keep the session's current value.
/// Samples are planar: all of channel 0, then all of channel 1.
class Bridge {
public:
  explicit Bridge(BridgeOptions options = {});
  ~Bridge();

  std::string handle(std::string_view frame);
  nlohmann::json handle_message(const nlohmann::json& message);

  std::size_t session_count() const;

private:
  struct Session;

  nlohmann::json on_hello();
  nlohmann::json on_set_config(const nlohmann::json& message);
  nlohmann::json on_audio_block(const nlohmann::json& message);
  std::shared_ptr<Session> find_session(const nlohmann::json& message);

  BridgeOptions options_;
  mutable std::mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_session_ = 1;
};

nlohmann::json bridge_error(std::string_view field, std::string_view reason);
nlohmann::json indicators_message(const NetworkConfig& config, double sample_rate);

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

std::string encode_samples(std::span<const float> samples);
std::vector<float> decode_samples(std::string_view text);

/// Serves POST /bridge (one frame per request) on 127.0.0.1 until stop().
class BridgeServer {
public:
  explicit BridgeServer(BridgeOptions options = {});
  ~BridgeServer();

  /// Binds to `port` (0 picks a free one) and returns the bound port.
  int bind(int port);
  /// Blocks serving requests.
  void listen();
  void stop();

  Bridge& bridge() noexcept { return bridge_; }

private:
  struct Impl;
  Bridge bridge_;
  std::unique_ptr<Impl> impl_;
};

} // namespace tcnfx
