#include "tcnfx/bridge.hpp"
#include "tcnfx/describe.hpp"
#include "tcnfx/error.hpp"

#include "test_support.hpp"

#include <catch_amalgamated.hpp>
#include <httplib.h>

#include <thread>

using namespace tcnfx;
using nlohmann::json;

namespace {

/// indicators as printed by describe(), parsed back out of its banner.
struct Banner {
  std::string rf_samples, rf_ms, params, seed;
};

Banner parse_banner(const std::string& text)
{
  Banner b;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string a, b2;
    if (line.rfind("receptive field:", 0) == 0) {
      ls >> a >> b2 >> b.rf_samples >> a >> b.rf_ms;
      b.rf_ms.erase(0, 1); // "("
    } else if (line.rfind("parameters:", 0) == 0) {
      ls >> a >> b.params;
    } else if (line.rfind("seed:", 0) == 0) {
      ls >> a >> b.seed;
    }
  }
  return b;
}

json hello(Bridge& bridge) { return bridge.handle_message({{"type", "hello"}}); }

} // namespace

TEST_CASE("describe and indicator formatting", "[describe]")
{
  NetworkConfig c;
  c.num_layers = 16;
  CHECK(format_rf_ms(131071, 44100.0) == "2972");
  CHECK(format_rf_ms(15, 44100.0) == "0.34");
  CHECK(format_rf_ms(551, 44100.0) == "12.5");
  CHECK(format_rf_ms(1, 44100.0) == "0.02");
  const auto ind = indicators(c, 44100.0);
  CHECK(ind.rf_samples == 131071);
  CHECK(ind.rf_ms == "2972");
  const auto text = describe(c, 44100.0);
  CHECK(text.find("131071 samples (2972 ms") != std::string::npos);
  CHECK(text.find("layer  in_ch  out_ch  kernel  dilation  depthwise") != std::string::npos);

  NetworkConfig p4;
  p4.num_layers = 1;
  p4.kernel_size = 3;
  p4.use_bias = true;
  CHECK(parse_banner(describe(p4, 44100.0)).params == "4");
  NetworkConfig p82;
  p82.num_layers = 2;
  p82.out_channels = 2;
  p82.use_bias = true;
  CHECK(parse_banner(describe(p82, 44100.0)).params == "82");
}

TEST_CASE("base64 sample framing", "[bridge]")
{
  const std::vector<std::uint8_t> hello_bytes = {'h', 'e', 'l', 'l', 'o'};
  CHECK(base64_encode(hello_bytes) == "aGVsbG8=");
  CHECK(base64_decode("aGVsbG8=") == hello_bytes);
  CHECK(base64_encode({}) == "");
  CHECK_THROWS_AS(base64_decode("abc"), Error);
  CHECK_THROWS_AS(base64_decode("a=bc"), Error);
  CHECK_THROWS_AS(base64_decode("ab!c"), Error);

  const std::vector<float> v = {0.0f, -1.0f, 0.5f, 1e-30f, 3.25f};
  CHECK(decode_samples(encode_samples(v)) == v);
  // 1.0f little-endian is 00 00 80 3F.
  CHECK(encode_samples(std::vector<float>{1.0f}) == "AACAPw==");
}

TEST_CASE("hello returns the engine descriptor", "[bridge]")
{
  Bridge bridge({256, 48000.0, 4});
  const json r = hello(bridge);
  CHECK(r["type"] == "hello");
  CHECK(r["protocol"] == kBridgeProtocolVersion);
  CHECK(r["session"].get<std::string>().size() > 0);
  const json& e = r["engine"];
  CHECK(e["block_size"] == 256);
  CHECK(e["sample_rate"] == 48000.0);
  CHECK(e["in_channels"] == 1);
  CHECK(e["out_channels"] == 1);
  CHECK(e["config"]["num_layers"] == 3);
  CHECK(e["indicators"]["rf_samples"] == 15);
  CHECK(bridge.session_count() == 1);

  for (int i = 0; i < 3; ++i)
    CHECK(hello(bridge)["type"] == "hello");
  const json full = hello(bridge);
  CHECK(full["type"] == "error");
  CHECK(full["field"] == "session");
}

TEST_CASE("set_config swaps and echoes describe's indicators", "[bridge]")
{
  Bridge bridge;
  const std::string session = hello(bridge)["session"];
  NetworkConfig expect;
  for (int layers = 3; layers <= 8; ++layers) {
    expect.num_layers = layers;
    expect.kernel_size = 5;
    expect.depthwise = layers % 2 == 0;
    expect.seed = 1000 + static_cast<std::uint64_t>(layers);
    const json reply = bridge.handle_message({{"type", "set_config"},
                                              {"session", session},
                                              {"config",
                                               {{"num_layers", layers},
                                                {"kernel_size", 5},
                                                {"depthwise", expect.depthwise},
                                                {"seed", std::to_string(expect.seed)}}}});
    REQUIRE(reply["type"] == "indicators");
    const Banner b = parse_banner(describe(expect, 44100.0));
    CHECK(std::to_string(reply["rf_samples"].get<std::int64_t>()) == b.rf_samples);
    CHECK(reply["rf_ms"].get<std::string>() == b.rf_ms);
    CHECK(std::to_string(reply["params"].get<std::int64_t>()) == b.params);
    CHECK(reply["seed"].get<std::string>() == b.seed);
  }
  // Numeric seeds are also accepted.
  const json numeric =
    bridge.handle_message({{"type", "set_config"}, {"session", session}, {"config", {{"seed", 7}}}});
  CHECK(numeric["seed"] == "7");
}

TEST_CASE("malformed messages get structured errors", "[bridge]")
{
  Bridge bridge;
  const std::string session = hello(bridge)["session"];
  auto err = [&](const std::string& frame) { return json::parse(bridge.handle(frame)); };

  json r = err("{not json");
  CHECK(r["type"] == "error");
  CHECK(r["field"] == "frame");
  CHECK(err("[1,2]")["field"] == "frame");
  CHECK(err(R"({"kind":"hello"})")["field"] == "type");
  CHECK(err(R"({"type":"dance"})")["field"] == "type");
  CHECK(err(R"({"type":"set_config","config":{}})")["field"] == "session");
  CHECK(err(R"({"type":"set_config","session":"nope","config":{}})")["field"] == "session");

  auto set = [&](json config) {
    return bridge.handle_message({{"type", "set_config"}, {"session", session}, {"config", std::move(config)}});
  };
  r = set({{"num_layers", 0}});
  CHECK(r["type"] == "error");
  CHECK(r["field"] == "num_layers");
  CHECK(r["reason"].get<std::string>().size() > 0);
  CHECK(set({{"warp", 1}})["field"] == "warp");
  CHECK(set({{"activation", "gelu"}})["field"] == "activation");
  CHECK(set({{"num_layers", {1, 2}}})["field"] == "num_layers");
  CHECK(set({{"num_layers", 40}, {"dilation_growth", 16}})["type"] == "error");

  // The failed updates did not change the session.
  CHECK(set(json::object())["rf_samples"] == 15);

  CHECK(bridge.handle_message({{"type", "audio_block"}, {"session", session}, {"n", 2}, {"samples", "AAAA"}})["field"] ==
        "samples");
  CHECK(bridge.handle_message({{"type", "audio_block"}, {"session", session}, {"n", 1}, {"channels", 2},
                               {"samples", "AAAAAA=="}})["field"] == "channels");
}

TEST_CASE("audio_block streams through the session engine", "[bridge]")
{
  Bridge bridge({128, 44100.0, 16});
  const std::string session = hello(bridge)["session"];
  const json cfg = {{"num_layers", 4}, {"out_channels", 2}, {"seed", "99"}, {"mix", 0.75}};
  REQUIRE(bridge.handle_message({{"type", "set_config"}, {"session", session}, {"config", cfg}})["type"] ==
          "indicators");

  Preset p;
  p.network.num_layers = 4;
  p.network.out_channels = 2;
  p.network.seed = 99;
  p.gains.mix = 0.75;
  StreamEngine ref(p.network, 128, 44100.0);
  ref.set_gains(p.gains);

  const auto x = test::random_signal(1, 1000, 21, 0.4);
  const std::vector<std::size_t> frames = {300, 128, 1, 571};
  std::size_t pos = 0;
  for (std::size_t f : frames) {
    const auto chunk = x.slice(pos, f);
    const json reply = bridge.handle_message(
      {{"type", "audio_block"}, {"session", session}, {"n", f}, {"channels", 1}, {"samples", encode_samples(chunk.samples())}});
    REQUIRE(reply["type"] == "audio_block");
    CHECK(reply["n"] == f);
    CHECK(reply["channels"] == 2);
    const auto got = decode_samples(reply["samples"].get<std::string>());

    AudioBuffer want(2, f);
    for (std::size_t off = 0; off < f; off += 128) {
      const std::size_t len = std::min<std::size_t>(128, f - off);
      const auto y = ref.process_block(chunk.slice(off, len));
      for (int c = 0; c < 2; ++c)
        std::copy(y.channel(c).begin(), y.channel(c).end(), want.channel(c).begin() + static_cast<std::ptrdiff_t>(off));
    }
    CHECK(got == std::vector<float>(want.samples().begin(), want.samples().end()));
    pos += f;
  }
}

TEST_CASE("bridge over HTTP", "[bridge][http]")
{
  BridgeServer server;
  const int port = server.bind(0);
  REQUIRE(port > 0);
  std::thread listener([&] { server.listen(); });

  httplib::Client client("127.0.0.1", port);
  client.set_connection_timeout(5);
  auto res = client.Post("/bridge", R"({"type":"hello"})", "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->get_header_value("Access-Control-Allow-Origin") == "*");
  const json h = json::parse(res->body);
  CHECK(h["type"] == "hello");

  const json set = {{"type", "set_config"}, {"session", h["session"]}, {"config", {{"num_layers", 5}}}};
  res = client.Post("/bridge", set.dump(), "application/json");
  REQUIRE(res);
  CHECK(json::parse(res->body)["rf_samples"] == 63);

  res = client.Post("/bridge", "garbage", "application/json");
  REQUIRE(res);
  CHECK(json::parse(res->body)["type"] == "error");

  server.stop();
  listener.join();
}
