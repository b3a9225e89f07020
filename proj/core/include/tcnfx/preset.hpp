#pragma once

#include "tcnfx/config.hpp"
#include "tcnfx/engine.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace tcnfx {

inline constexpr int kPresetVersion = 1;

/// Everything needed to reproduce an effect bit-exactly.
struct Preset {
  int version = kPresetVersion;
  std::string name = "default";
  NetworkConfig network;
  GainSettings gains;
  bool dc_blocker = true;

  void validate() const;
  bool operator==(const Preset&) const = default;
};

/// Canonical `key = value` text with a fixed key order. Doubles use the
/// shortest representation that parses back to the same value.
std::string serialize_preset(const Preset& preset);

/// Rejects unknown versions, unknown keys, duplicates, missing keys and
/// out-of-range values; the error's field() names the offending key.
Preset parse_preset(std::string_view text);

/// Sets one field from its textual form, as it would appear in a preset.
/// Throws Error(UnsupportedVersion) for unknown keys; does not validate
/// cross-field ranges.
void set_preset_field(Preset& preset, std::string_view key, std::string_view value);

/// Preset keys in canonical order, excluding `version`.
std::vector<std::string_view> preset_field_keys();

Preset load_preset(const std::filesystem::path& path);
void save_preset(const std::filesystem::path& path, const Preset& preset);

} // namespace tcnfx
