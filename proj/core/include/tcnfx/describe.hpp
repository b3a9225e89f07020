#pragma once

#include "tcnfx/config.hpp"

#include <cstdint>
#include <string>

namespace tcnfx {

/// The read-outs a control surface shows for a config.
struct Indicators {
  std::int64_t rf_samples = 0;
  std::string rf_ms;
  std::int64_t params = 0;
  std::uint64_t seed = 0;

  bool operator==(const Indicators&) const = default;
};

/// Milliseconds with precision that shrinks as the value grows:
/// "0.34", "12.5", "2972".
std::string format_rf_ms(std::int64_t rf_samples, double sample_rate);

Indicators indicators(const NetworkConfig& config, double sample_rate);

/// Multi-line summary: indicators plus a per-layer table.
std::string describe(const NetworkConfig& config, double sample_rate);

} // namespace tcnfx
