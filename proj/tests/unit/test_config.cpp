#include "tcnfx/config.hpp"
#include "tcnfx/error.hpp"

#include <catch_amalgamated.hpp>

#include <cstdint>
#include <limits>

using namespace tcnfx;

namespace {

NetworkConfig make(int layers, int kernel, int growth, int width = 8, int in = 1, int out = 1, bool depthwise = false,
                   bool bias = false)
{
  NetworkConfig c;
  c.num_layers = layers;
  c.kernel_size = kernel;
  c.dilation_growth = growth;
  c.channel_width = width;
  c.in_channels = in;
  c.out_channels = out;
  c.depthwise = depthwise;
  c.use_bias = bias;
  return c;
}

ErrorKind kind_of(const NetworkConfig& c)
{
  try {
    (void)receptive_field(c);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Io; // sentinel: nothing thrown
}

} // namespace

TEST_CASE("receptive field examples", "[config]")
{
  CHECK(receptive_field(make(1, 1, 1)) == 1);
  CHECK(receptive_field(make(3, 3, 2)) == 15);
  CHECK(receptive_field(make(16, 3, 2)) == 131071);
}

TEST_CASE("receptive field matches the geometric closed form", "[config][property]")
{
  for (int L = 1; L <= 10; ++L)
    for (int k = 1; k <= 7; ++k)
      for (int g = 1; g <= 4; ++g) {
        std::int64_t pow = 1;
        for (int l = 0; l < L; ++l)
          pow *= g;
        const std::int64_t closed = g == 1 ? 1 + (k - 1) * L : 1 + (k - 1) * (pow - 1) / (g - 1);
        INFO("L=" << L << " k=" << k << " g=" << g);
        CHECK(receptive_field(make(L, k, g)) == closed);
      }
}

TEST_CASE("receptive field overflow is reported, not wrapped", "[config]")
{
  // 1 + 2 * (2^31 - 1) exceeds 2^31.
  CHECK(kind_of(make(31, 3, 2)) == ErrorKind::ConfigTooLarge);
  CHECK(kind_of(make(64, 64, 16)) == ErrorKind::ConfigTooLarge);
  // 1 + (2^31 - 1) = 2^31 is the largest accepted value.
  CHECK(receptive_field(make(31, 2, 2)) == (std::int64_t{1} << 31));
}

TEST_CASE("validation names the offending field", "[config]")
{
  auto field_of = [](const NetworkConfig& c) {
    try {
      c.validate();
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InvalidConfig);
      return e.field();
    }
    return std::string("<none>");
  };
  CHECK(field_of(make(0, 3, 2)) == "num_layers");
  CHECK(field_of(make(65, 3, 2)) == "num_layers");
  CHECK(field_of(make(3, 0, 2)) == "kernel_size");
  CHECK(field_of(make(3, 3, 0)) == "dilation_growth");
  CHECK(field_of(make(3, 3, 2, 0)) == "channel_width");
  CHECK(field_of(make(3, 3, 2, 8, 3)) == "in_channels");
  CHECK(field_of(make(3, 3, 2, 8, 1, 0)) == "out_channels");
  NetworkConfig bad_init = make(3, 3, 2);
  bad_init.init = InitScheme::normal(std::numeric_limits<double>::quiet_NaN());
  CHECK(field_of(bad_init) == "init_param");
  bad_init.init = InitScheme::uniform(-1.0);
  CHECK(field_of(bad_init) == "init_param");
  CHECK(field_of(make(3, 3, 2)) == "<none>");
}

TEST_CASE("layer plan routing", "[config]")
{
  SECTION("single layer connects input to output")
  {
    const auto plan = derive_layer_plan(make(1, 3, 2, 8, 1, 2));
    REQUIRE(plan.size() == 1);
    CHECK(plan[0].in_ch == 1);
    CHECK(plan[0].out_ch == 2);
    CHECK(plan[0].dilation == 1);
    CHECK_FALSE(plan[0].depthwise);
  }
  SECTION("dense")
  {
    const auto plan = derive_layer_plan(make(3, 3, 2, 8, 1, 2));
    REQUIRE(plan.size() == 3);
    CHECK((plan[0].in_ch == 1 && plan[0].out_ch == 8 && plan[0].dilation == 1 && !plan[0].depthwise));
    CHECK((plan[1].in_ch == 8 && plan[1].out_ch == 8 && plan[1].dilation == 2 && !plan[1].depthwise));
    CHECK((plan[2].in_ch == 8 && plan[2].out_ch == 2 && plan[2].dilation == 4 && !plan[2].depthwise));
  }
  SECTION("depthwise keeps entry and exit dense")
  {
    const auto plan = derive_layer_plan(make(3, 3, 2, 8, 1, 2, true));
    REQUIRE(plan.size() == 3);
    CHECK((plan[0].in_ch == 1 && plan[0].out_ch == 8 && !plan[0].depthwise));
    CHECK((plan[1].in_ch == 8 && plan[1].out_ch == 8 && plan[1].depthwise));
    CHECK((plan[2].in_ch == 8 && plan[2].out_ch == 2 && !plan[2].depthwise));
  }
  SECTION("two layers have no hidden layer to make depthwise")
  {
    const auto plan = derive_layer_plan(make(2, 3, 2, 8, 1, 1, true));
    REQUIRE(plan.size() == 2);
    CHECK_FALSE(plan[0].depthwise);
    CHECK_FALSE(plan[1].depthwise);
  }
}

TEST_CASE("layer plan is total and consistent over the config lattice", "[config][property]")
{
  for (int L = 1; L <= 6; ++L)
    for (int k = 1; k <= 4; ++k)
      for (int g = 1; g <= 3; ++g)
        for (int c = 1; c <= 8; c += 3)
          for (int in = 1; in <= 2; ++in)
            for (int out = 1; out <= 2; ++out)
              for (bool dw : {false, true}) {
                const auto cfg = make(L, k, g, c, in, out, dw);
                const auto plan = derive_layer_plan(cfg);
                REQUIRE(static_cast<int>(plan.size()) == L);
                CHECK(plan.front().in_ch == in);
                CHECK(plan.back().out_ch == out);
                std::int64_t span = 0;
                std::int64_t dilation = 1;
                for (std::size_t l = 0; l < plan.size(); ++l) {
                  if (l > 0)
                    CHECK(plan[l].in_ch == plan[l - 1].out_ch);
                  CHECK(plan[l].dilation == dilation);
                  CHECK(plan[l].kernel_size == k);
                  const bool hidden = l > 0 && l + 1 < plan.size();
                  CHECK(plan[l].depthwise == (dw && hidden));
                  if (plan[l].depthwise)
                    CHECK(plan[l].in_ch == plan[l].out_ch);
                  span += plan[l].span();
                  dilation *= g;
                }
                CHECK(span + 1 == receptive_field(cfg));
              }
}

TEST_CASE("parameter count examples", "[config]")
{
  CHECK(param_count(make(1, 3, 1, 8, 1, 1, false, true)) == 4);
  CHECK(param_count(make(2, 3, 2, 8, 1, 2, false, true)) == 82);

  const auto dense = derive_layer_plan(make(3, 3, 2, 8, 1, 1, false));
  const auto dw = derive_layer_plan(make(3, 3, 2, 8, 1, 1, true));
  CHECK(dw[1].weight_count() == 24);
  CHECK(dense[1].weight_count() == 192);
}

TEST_CASE("MAC count equals weight count per output sample", "[config]")
{
  const auto cfg = make(5, 3, 2, 8, 1, 2, true, true);
  std::int64_t weights = 0;
  for (const auto& s : derive_layer_plan(cfg))
    weights += s.weight_count();
  CHECK(macs_per_sample(cfg) == weights);
}

TEST_CASE("names round-trip", "[config]")
{
  for (auto a : {Activation::Linear, Activation::ReLU, Activation::Tanh, Activation::Sigmoid, Activation::SoftSign,
                 Activation::LeakyReLU})
    CHECK(parse_activation(to_string(a)) == a);
  for (auto k : {InitKind::NormalStd, InitKind::Uniform, InitKind::GlorotUniform, InitKind::HeNormal})
    CHECK(parse_init_kind(to_string(k)) == k);
  CHECK_FALSE(parse_activation("gelu").has_value());
  CHECK_FALSE(parse_init_kind("xavier").has_value());
}
