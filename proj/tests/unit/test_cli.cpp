// Drives the built tcnfx binary end to end.

#include "tcnfx/preset.hpp"
#include "tcnfx/wav.hpp"

#include "test_support.hpp"

#include <catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

namespace fs = std::filesystem;
using namespace tcnfx;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args)
{
  const std::string cmd = std::string(TCNFX_CLI_PATH) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe))
    r.out.append(buf, n);
  const int raw = ::pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::vector<char> slurp(const fs::path& p)
{
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

struct TempDir {
  fs::path path = fs::temp_directory_path() / ("tcnfx_cli_" + std::to_string(::getpid()));
  TempDir() { fs::create_directories(path); }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const char* name) const { return (path / name).string(); }
};

} // namespace

TEST_CASE("describe prints the indicator banner", "[cli]")
{
  auto r = run("describe --layers 16 --kernel 3 --dilation-growth 2");
  CHECK(r.status == 0);
  CHECK(r.out.find("131071 samples (2972 ms at 44100 Hz)") != std::string::npos);

  r = run("describe --layers 1 --kernel 3 --bias");
  CHECK(r.out.find("parameters:      4\n") != std::string::npos);
  r = run("describe --layers 2 --out-ch 2 --bias");
  CHECK(r.out.find("parameters:      82\n") != std::string::npos);
  r = run("describe --layers 3 --depthwise --seed 9");
  CHECK(r.out.find("receptive field: 15 samples (0.34 ms") != std::string::npos);
  CHECK(r.out.find("seed:            9\n") != std::string::npos);
  CHECK(r.out.find("    1      8       8       3         2  yes") != std::string::npos);
}

TEST_CASE("invalid configuration exits nonzero with the field name", "[cli]")
{
  auto r = run("describe --layers 0");
  CHECK(r.status != 0);
  CHECK(r.out.find("num_layers") != std::string::npos);
  r = run("describe --layers 40 --dilation-growth 16");
  CHECK(r.status != 0);
  CHECK(r.out.find("too large") != std::string::npos);
  CHECK(run("render /nonexistent.wav /tmp/x.wav").status != 0);
  CHECK(run("frobnicate").status != 0);
}

TEST_CASE("render is deterministic and reports its banner", "[cli]")
{
  TempDir dir;
  const auto input = test::random_signal(1, 22050, 3, 0.5);
  write_wav(dir / "in.wav", input);

  auto r = run("preset save " + (dir / "p.txt") + " --seed 42 --layers 6 --out-ch 2 --activation softsign");
  REQUIRE(r.status == 0);
  r = run("render " + (dir / "in.wav") + " " + (dir / "a.wav") + " --preset " + (dir / "p.txt"));
  REQUIRE(r.status == 0);
  CHECK(r.out.find("receptive field: 127 samples") != std::string::npos);
  CHECK(r.out.find("real-time factor:") != std::string::npos);
  r = run("render " + (dir / "in.wav") + " " + (dir / "b.wav") + " --preset " + (dir / "p.txt") +
          " --block-size 77");
  REQUIRE(r.status == 0);
  CHECK(slurp(dir / "a.wav") == slurp(dir / "b.wav"));
  CHECK(read_wav(dir / "a.wav").channels() == 2);

  // Inline flags override the preset file.
  r = run("render " + (dir / "in.wav") + " " + (dir / "c.wav") + " --preset " + (dir / "p.txt") + " --seed 43");
  REQUIRE(r.status == 0);
  CHECK(slurp(dir / "a.wav") != slurp(dir / "c.wav"));
}

TEST_CASE("dry-only render reproduces the input", "[cli]")
{
  TempDir dir;
  const auto input = test::random_signal(1, 5000, 8, 0.5);
  write_wav(dir / "in.wav", input);
  REQUIRE(run("render " + (dir / "in.wav") + " " + (dir / "out.wav") + " --mix 0 --dc-blocker=false").status == 0);
  CHECK(test::max_abs_diff(read_wav(dir / "out.wav"), input) <= 1e-6);

  REQUIRE(run("render " + (dir / "in.wav") + " " + (dir / "out16.wav") + " --mix 0 --format pcm16").status == 0);
  CHECK(test::max_abs_diff(read_wav(dir / "out16.wav"), input) <= 1.0 / 32768.0);
}

TEST_CASE("preset save and load", "[cli]")
{
  TempDir dir;
  auto r = run("preset save " + (dir / "p.txt") + " --name \"warm room\" --kernel 4 --init glorot_uniform --mix 0.5");
  REQUIRE(r.status == 0);
  const Preset p = load_preset(dir / "p.txt");
  CHECK(p.name == "warm room");
  CHECK(p.network.kernel_size == 4);
  CHECK(p.network.init == InitScheme::glorot_uniform());
  CHECK(p.gains.mix == 0.5);

  r = run("preset load " + (dir / "p.txt"));
  CHECK(r.status == 0);
  CHECK(r.out.find("kernel_size = 4") != std::string::npos);
  CHECK(r.out.find("receptive field:") != std::string::npos);

  std::ofstream(dir / "bad.txt") << "version = 9\n";
  r = run("preset load " + (dir / "bad.txt"));
  CHECK(r.status != 0);
  CHECK(r.out.find("version") != std::string::npos);
}

TEST_CASE("bench runs a sweep file and writes CSV", "[cli]")
{
  TempDir dir;
  std::ofstream(dir / "sweep.txt") << "# label: key=value ...\n"
                                      "trivial: num_layers=1 kernel_size=1 channel_width=1 block_size=512\n"
                                      "huge: num_layers=40 dilation_growth=16\n";
  const auto r = run("bench --sweep " + (dir / "sweep.txt") + " --csv " + (dir / "out.csv") + " --seconds 5");
  REQUIRE(r.status == 0);
  CHECK(r.out.find("trivial") != std::string::npos);
  CHECK(r.out.find("skipped") != std::string::npos);
  const auto csv = slurp(dir / "out.csv");
  const std::string text(csv.begin(), csv.end());
  CHECK(text.find("label,") == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
}
