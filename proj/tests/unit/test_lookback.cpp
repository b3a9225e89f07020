#include "tcnfx/lookback.hpp"

#include <catch_amalgamated.hpp>

#include <numeric>

using namespace tcnfx;

namespace {

std::vector<float> row(ConstPlanar v, int c) { return {v.channel(c), v.channel(c) + v.length}; }

} // namespace

TEST_CASE("window is history followed by the block", "[lookback]")
{
  LookbackBuffer lb(2, 3, 4);
  CHECK(lb.capacity() == 7);
  CHECK(lb.allocated_per_channel() == 7);

  std::vector<float> block(8);
  std::iota(block.begin(), block.end(), 1.0f); // ch0: 1..4, ch1: 5..8
  auto w = lb.push(ConstPlanar{block.data(), 4, 4, 2});
  CHECK(row(w, 0) == std::vector<float>{0, 0, 0, 1, 2, 3, 4});
  CHECK(row(w, 1) == std::vector<float>{0, 0, 0, 5, 6, 7, 8});
  CHECK(row(lb.recent(4), 0) == std::vector<float>{1, 2, 3, 4});
  lb.advance(4);
  CHECK(std::vector<float>(lb.history_of(0).begin(), lb.history_of(0).end()) == std::vector<float>{2, 3, 4});

  // Short block: history shifts by exactly its length.
  w = lb.push(ConstPlanar{block.data(), 4, 2, 2});
  CHECK(row(w, 0) == std::vector<float>{2, 3, 4, 1, 2});
  lb.advance(2);
  CHECK(std::vector<float>(lb.history_of(0).begin(), lb.history_of(0).end()) == std::vector<float>{4, 1, 2});
  CHECK(std::vector<float>(lb.history_of(1).begin(), lb.history_of(1).end()) == std::vector<float>{8, 5, 6});

  lb.reset();
  CHECK(std::vector<float>(lb.history_of(1).begin(), lb.history_of(1).end()) == std::vector<float>{0, 0, 0});
}

TEST_CASE("zero history passes blocks straight through", "[lookback]")
{
  LookbackBuffer lb(1, 0, 512);
  CHECK(lb.allocated_per_channel() == 512);
  std::vector<float> block(10, 2.0f);
  const auto w = lb.push(ConstPlanar{block.data(), 10, 10, 1}, 0.5f);
  CHECK(row(w, 0) == std::vector<float>(10, 1.0f));
  lb.advance(10);
}

TEST_CASE("ramped gain reaches the target on the last sample", "[lookback]")
{
  LookbackBuffer lb(1, 0, 4);
  std::vector<float> ones(4, 1.0f);
  const auto w = lb.push_ramped(ConstPlanar{ones.data(), 4, 4, 1}, 0.0f, 1.0f);
  CHECK(row(w, 0) == std::vector<float>{0.25f, 0.5f, 0.75f, 1.0f});
}

TEST_CASE("seeding keeps the most recent shared history", "[lookback]")
{
  LookbackBuffer big(1, 5, 2);
  std::vector<float> block = {1, 2};
  for (int i = 0; i < 3; ++i) {
    big.push(ConstPlanar{block.data(), 2, 2, 1});
    big.advance(2);
    block[0] += 2;
    block[1] += 2;
  }
  // history: 2 3 4 5 6
  LookbackBuffer small(1, 2, 2);
  small.seed_from(big);
  CHECK(std::vector<float>(small.history_of(0).begin(), small.history_of(0).end()) == std::vector<float>{5, 6});

  LookbackBuffer larger(1, 7, 2);
  larger.seed_from(big);
  CHECK(std::vector<float>(larger.history_of(0).begin(), larger.history_of(0).end()) ==
        std::vector<float>{0, 0, 2, 3, 4, 5, 6});
}
