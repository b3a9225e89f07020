#pragma once

#include "tcnfx/config.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace tcnfx {

struct BenchCase {
  std::string label;
  NetworkConfig config;
  std::size_t block_size = 512;
};

struct BenchResult {
  BenchCase bench;
  bool skipped = false;
  std::string skip_reason;
  std::int64_t receptive_field = 0;
  double rf_seconds = 0.0;
  std::int64_t params = 0;
  std::int64_t macs_per_sample = 0;
  std::size_t blocks = 0;
  double audio_seconds = 0.0;
  double rtf_overall = 0.0; // total processing time / audio time
  double rtf_median = 0.0;  // per block
  double rtf_p99 = 0.0;
};

/// Trivial, distortion-scale and reverb-scale networks, each large one in a
/// dense/depthwise pair. Includes a depthwise net with RF >= 4 s at 44.1 kHz,
/// at block 512 and again at block 4096.
std::vector<BenchCase> default_sweep();

/// One case per non-empty, non-# line: `label: key=value key=value ...`
/// with preset keys plus `block_size`. Unlisted keys keep NetworkConfig
/// defaults.
std::vector<BenchCase> parse_sweep(std::string_view text);

/// Times process_block over at least `seconds` of seeded pink noise.
/// Oversized configs come back with skipped = true instead of throwing.
BenchResult run_bench(const BenchCase& bench, double sample_rate = 44100.0, double seconds = 5.0);

std::string bench_report_text(const std::vector<BenchResult>& results);
std::string bench_report_csv(const std::vector<BenchResult>& results);

} // namespace tcnfx
