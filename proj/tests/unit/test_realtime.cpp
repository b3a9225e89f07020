// Counts heap allocations made while the audio path runs.

#include "tcnfx/engine.hpp"

#include "test_support.hpp"

#include <catch_amalgamated.hpp>

#include <atomic>
#include <cstdlib>
#include <new>

namespace {
std::atomic<bool> g_tracking{false};
std::atomic<long> g_allocations{0};

void* counted(std::size_t size)
{
  if (g_tracking.load(std::memory_order_relaxed))
    g_allocations.fetch_add(1, std::memory_order_relaxed);
  if (void* p = std::malloc(size ? size : 1))
    return p;
  throw std::bad_alloc();
}
} // namespace

void* operator new(std::size_t size) { return counted(size); }
void* operator new[](std::size_t size) { return counted(size); }
void* operator new(std::size_t size, const std::nothrow_t&) noexcept
{
  try {
    return counted(size);
  } catch (...) {
    return nullptr;
  }
}
void operator delete(void* p) noexcept { std::free(p); }
void operator delete[](void* p) noexcept { std::free(p); }
void operator delete(void* p, std::size_t) noexcept { std::free(p); }
void operator delete[](void* p, std::size_t) noexcept { std::free(p); }

using namespace tcnfx;

namespace {

long allocations_during(auto&& fn)
{
  g_allocations = 0;
  g_tracking = true;
  fn();
  g_tracking = false;
  return g_allocations.load();
}

} // namespace

TEST_CASE("process_block does not allocate", "[engine][realtime]")
{
  for (bool depthwise : {false, true}) {
    NetworkConfig cfg;
    cfg.num_layers = 6;
    cfg.kernel_size = 3;
    cfg.out_channels = 2;
    cfg.depthwise = depthwise;
    cfg.use_bias = true;
    StreamEngine engine(cfg, 256, 44100.0);
    const auto x = test::random_signal(1, 256 * 40, 1, 0.3);
    AudioBuffer y(2, 256);

    auto run = [&](std::size_t first, std::size_t count) {
      for (std::size_t b = first; b < first + count; ++b) {
        const std::size_t n = b % 7 == 3 ? 100 : 256;
        engine.process_block(ConstPlanar{x.samples().data() + b * 256, x.length(), n, 1},
                             MutablePlanar{y.samples().data(), 256, n, 2});
      }
    };

    CHECK(allocations_during([&] { run(0, 10); }) == 0);

    // Swaps are built on the control side; the handover and fade are not.
    auto next = cfg;
    next.seed = 7;
    next.num_layers = 8;
    engine.swap_network(next);
    CHECK(allocations_during([&] { run(10, 12); }) == 0);
    CHECK(engine.config() == next);

    engine.set_gains({-6.0, 3.0, 0.5});
    CHECK(allocations_during([&] {
            run(22, 8);
            engine.reset();
            run(30, 4);
          }) == 0);
  }
}

TEST_CASE("history allocation is exactly M + N per channel", "[engine][realtime]")
{
  NetworkConfig cfg;
  cfg.num_layers = 7;
  cfg.in_channels = 2;
  StreamEngine engine(cfg, 300, 44100.0);
  CHECK(engine.history_allocation() == static_cast<std::size_t>(engine.receptive_field() - 1) + 300);
}
