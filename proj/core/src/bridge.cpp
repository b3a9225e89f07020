#include "tcnfx/bridge.hpp"

#include "tcnfx/describe.hpp"
#include "tcnfx/error.hpp"

#include <httplib.h>

#include <array>
#include <bit>
#include <charconv>
#include <cstring>

namespace tcnfx {

using nlohmann::json;

namespace {

constexpr std::string_view kAlphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string value_text(std::string_view key, const json& v)
{
  if (v.is_boolean())
    return v.get<bool>() ? "true" : "false";
  if (v.is_number_unsigned())
    return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_integer())
    return std::to_string(v.get<std::int64_t>());
  if (v.is_number_float()) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v.get<double>());
    return std::string(buf.data(), ptr);
  }
  if (v.is_string())
    return v.get<std::string>();
  throw Error(ErrorKind::Format, std::string(key), "unsupported JSON value type");
}

json config_json(const Preset& p)
{
  const auto& c = p.network;
  return {
    {"name", p.name},
    {"num_layers", c.num_layers},
    {"kernel_size", c.kernel_size},
    {"dilation_growth", c.dilation_growth},
    {"channel_width", c.channel_width},
    {"in_channels", c.in_channels},
    {"out_channels", c.out_channels},
    {"activation", std::string(to_string(c.activation))},
    {"init", std::string(to_string(c.init.kind))},
    {"init_param", c.init.param},
    {"depthwise", c.depthwise},
    {"use_bias", c.use_bias},
    {"seed", std::to_string(c.seed)},
    {"input_gain_db", p.gains.input_db},
    {"output_gain_db", p.gains.output_db},
    {"mix", p.gains.mix},
    {"dc_blocker", p.dc_blocker},
  };
}

} // namespace

struct Bridge::Session {
  std::string id;
  std::mutex control; // serializes set_config
  std::mutex audio;   // serializes audio_block and engine replacement
  Preset preset;
  std::unique_ptr<StreamEngine> engine;
};

std::string base64_encode(std::span<const std::uint8_t> bytes)
{
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t v = std::uint32_t(bytes[i]) << 16 | std::uint32_t(bytes[i + 1]) << 8 | bytes[i + 2];
    out += kAlphabet[v >> 18 & 63];
    out += kAlphabet[v >> 12 & 63];
    out += kAlphabet[v >> 6 & 63];
    out += kAlphabet[v & 63];
  }
  if (i + 1 == bytes.size()) {
    const std::uint32_t v = std::uint32_t(bytes[i]) << 16;
    out += kAlphabet[v >> 18 & 63];
    out += kAlphabet[v >> 12 & 63];
    out += "==";
  } else if (i + 2 == bytes.size()) {
    const std::uint32_t v = std::uint32_t(bytes[i]) << 16 | std::uint32_t(bytes[i + 1]) << 8;
    out += kAlphabet[v >> 18 & 63];
    out += kAlphabet[v >> 12 & 63];
    out += kAlphabet[v >> 6 & 63];
    out += '=';
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text)
{
  if (text.size() % 4 != 0)
    throw Error(ErrorKind::Format, "samples", "base64 length must be a multiple of 4");
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    std::uint32_t v = 0;
    int pad = 0;
    for (int j = 0; j < 4; ++j) {
      const char ch = text[i + static_cast<std::size_t>(j)];
      std::uint32_t d = 0;
      if (ch == '=') {
        if (i + 4 != text.size() || j < 2)
          throw Error(ErrorKind::Format, "samples", "misplaced base64 padding");
        ++pad;
      } else {
        if (pad)
          throw Error(ErrorKind::Format, "samples", "misplaced base64 padding");
        const auto pos = kAlphabet.find(ch);
        if (pos == std::string_view::npos)
          throw Error(ErrorKind::Format, "samples", "invalid base64 character");
        d = static_cast<std::uint32_t>(pos);
      }
      v = v << 6 | d;
    }
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    if (pad < 2)
      out.push_back(static_cast<std::uint8_t>(v >> 8));
    if (pad < 1)
      out.push_back(static_cast<std::uint8_t>(v));
  }
  return out;
}

std::string encode_samples(std::span<const float> samples)
{
  std::vector<std::uint8_t> bytes(samples.size() * 4);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto u = std::bit_cast<std::uint32_t>(samples[i]);
    for (int b = 0; b < 4; ++b)
      bytes[i * 4 + static_cast<std::size_t>(b)] = static_cast<std::uint8_t>(u >> (8 * b));
  }
  return base64_encode(bytes);
}

std::vector<float> decode_samples(std::string_view text)
{
  const auto bytes = base64_decode(text);
  if (bytes.size() % 4 != 0)
    throw Error(ErrorKind::Format, "samples", "sample payload is not a whole number of float32 values");
  std::vector<float> out(bytes.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint32_t u = 0;
    for (int b = 0; b < 4; ++b)
      u |= std::uint32_t(bytes[i * 4 + static_cast<std::size_t>(b)]) << (8 * b);
    out[i] = std::bit_cast<float>(u);
  }
  return out;
}

json bridge_error(std::string_view field, std::string_view reason)
{
  return {{"type", "error"}, {"field", std::string(field)}, {"reason", std::string(reason)}};
}

json indicators_message(const NetworkConfig& config, double sample_rate)
{
  const Indicators ind = indicators(config, sample_rate);
  return {{"type", "indicators"},
          {"rf_samples", ind.rf_samples},
          {"rf_ms", ind.rf_ms},
          {"params", ind.params},
          {"seed", std::to_string(ind.seed)}};
}

Bridge::Bridge(BridgeOptions options) : options_(options) {}

Bridge::~Bridge() = default;

std::size_t Bridge::session_count() const
{
  std::lock_guard lock(sessions_mutex_);
  return sessions_.size();
}

std::string Bridge::handle(std::string_view frame)
{
  json message;
  try {
    message = json::parse(frame);
  } catch (const json::exception& e) {
    return bridge_error("frame", std::string("malformed JSON: ") + e.what()).dump();
  }
  return handle_message(message).dump();
}

json Bridge::handle_message(const json& message)
{
  try {
    if (!message.is_object())
      return bridge_error("frame", "expected a JSON object");
    const auto type = message.find("type");
    if (type == message.end() || !type->is_string())
      return bridge_error("type", "missing message type");
    const std::string t = type->get<std::string>();
    if (t == "hello")
      return on_hello();
    if (t == "set_config")
      return on_set_config(message);
    if (t == "audio_block")
      return on_audio_block(message);
    return bridge_error("type", "unknown message type '" + t + "'");
  } catch (const Error& e) {
    return bridge_error(e.field(), e.reason());
  } catch (const json::exception& e) {
    return bridge_error("frame", e.what());
  }
}

std::shared_ptr<Bridge::Session> Bridge::find_session(const json& message)
{
  const auto it = message.find("session");
  if (it == message.end() || !it->is_string())
    throw Error(ErrorKind::InvalidInput, "session", "missing session id");
  std::lock_guard lock(sessions_mutex_);
  const auto found = sessions_.find(it->get<std::string>());
  if (found == sessions_.end())
    throw Error(ErrorKind::InvalidInput, "session", "unknown session '" + it->get<std::string>() + "'");
  return found->second;
}

json Bridge::on_hello()
{
  auto session = std::make_shared<Session>();
  EngineOptions engine_options;
  engine_options.dc_blocker = session->preset.dc_blocker;
  session->engine =
    std::make_unique<StreamEngine>(session->preset.network, options_.block_size, options_.sample_rate, engine_options);
  session->engine->set_gains(session->preset.gains);
  {
    std::lock_guard lock(sessions_mutex_);
    if (sessions_.size() >= options_.max_sessions)
      throw Error(ErrorKind::InvalidInput, "session", "too many sessions");
    session->id = "s" + std::to_string(next_session_++);
    sessions_[session->id] = session;
  }
  json ind = indicators_message(session->preset.network, options_.sample_rate);
  ind.erase("type");
  return {{"type", "hello"},
          {"session", session->id},
          {"protocol", kBridgeProtocolVersion},
          {"engine",
           {{"block_size", options_.block_size},
            {"sample_rate", options_.sample_rate},
            {"in_channels", session->engine->in_channels()},
            {"out_channels", session->engine->out_channels()},
            {"config", config_json(session->preset)},
            {"indicators", ind}}}};
}

json Bridge::on_set_config(const json& message)
{
  auto session = find_session(message);
  const auto cfg = message.find("config");
  if (cfg == message.end() || !cfg->is_object())
    throw Error(ErrorKind::InvalidInput, "config", "missing config object");

  std::lock_guard control(session->control);
  Preset next = session->preset;
  for (const auto& [key, value] : cfg->items()) {
    if (key == "name") {
      if (!value.is_string())
        throw Error(ErrorKind::Format, "name", "expected a string");
      next.name = value.get<std::string>();
      continue;
    }
    set_preset_field(next, key, value_text(key, value));
  }
  next.validate();

  const bool rebuild = next.network.in_channels != session->preset.network.in_channels ||
                       next.network.out_channels != session->preset.network.out_channels ||
                       next.dc_blocker != session->preset.dc_blocker;
  if (rebuild) {
    EngineOptions engine_options;
    engine_options.dc_blocker = next.dc_blocker;
    auto engine =
      std::make_unique<StreamEngine>(next.network, options_.block_size, options_.sample_rate, engine_options);
    engine->set_gains(next.gains);
    std::lock_guard audio(session->audio);
    session->engine = std::move(engine);
  } else {
    session->engine->swap_network(next.network);
    session->engine->set_gains(next.gains);
  }
  session->preset = next;
  json reply = indicators_message(next.network, options_.sample_rate);
  reply["session"] = session->id;
  return reply;
}

json Bridge::on_audio_block(const json& message)
{
  auto session = find_session(message);
  const auto n_it = message.find("n");
  const auto ch_it = message.find("channels");
  const auto s_it = message.find("samples");
  if (n_it == message.end() || !n_it->is_number_integer() || n_it->get<std::int64_t>() < 0)
    throw Error(ErrorKind::InvalidInput, "n", "expected a non-negative sample count");
  if (s_it == message.end() || !s_it->is_string())
    throw Error(ErrorKind::InvalidInput, "samples", "missing base64 samples");
  const auto n = n_it->get<std::size_t>();

  std::lock_guard audio(session->audio);
  StreamEngine& engine = *session->engine;
  const int in_ch = engine.in_channels();
  if (ch_it != message.end() && (!ch_it->is_number_integer() || ch_it->get<int>() != in_ch))
    throw Error(ErrorKind::ChannelMismatch, "channels",
                "engine expects " + std::to_string(in_ch) + " input channels");
  const std::vector<float> samples = decode_samples(s_it->get<std::string>());
  if (samples.size() != n * static_cast<std::size_t>(in_ch))
    throw Error(ErrorKind::InvalidInput, "samples",
                "expected " + std::to_string(n * static_cast<std::size_t>(in_ch)) + " samples, got " +
                  std::to_string(samples.size()));

  const int out_ch = engine.out_channels();
  std::vector<float> out(n * static_cast<std::size_t>(out_ch));
  const std::size_t block = engine.block_size();
  for (std::size_t pos = 0; pos < n; pos += block) {
    const std::size_t len = std::min(block, n - pos);
    engine.process_block(ConstPlanar{samples.data() + pos, n, len, in_ch},
                         MutablePlanar{out.data() + pos, n, len, out_ch});
  }
  return {{"type", "audio_block"},
          {"session", session->id},
          {"n", n},
          {"channels", out_ch},
          {"samples", encode_samples(out)}};
}

struct BridgeServer::Impl {
  httplib::Server server;
};

BridgeServer::BridgeServer(BridgeOptions options) : bridge_(options), impl_(std::make_unique<Impl>())
{
  auto& srv = impl_->server;
  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Headers", "Content-Type"},
                           {"Access-Control-Allow-Methods", "POST, OPTIONS"}});
  srv.Options("/bridge", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  srv.Post("/bridge", [this](const httplib::Request& req, httplib::Response& res) {
    res.set_content(bridge_.handle(req.body), "application/json");
  });
}

BridgeServer::~BridgeServer() { stop(); }

int BridgeServer::bind(int port)
{
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port("127.0.0.1");
    if (bound <= 0)
      throw Error(ErrorKind::Io, "port", "cannot bind any port on 127.0.0.1");
    return bound;
  }
  if (!impl_->server.bind_to_port("127.0.0.1", port))
    throw Error(ErrorKind::Io, "port", "cannot bind 127.0.0.1:" + std::to_string(port));
  return port;
}

void BridgeServer::listen() { impl_->server.listen_after_bind(); }

void BridgeServer::stop() { impl_->server.stop(); }

} // namespace tcnfx
