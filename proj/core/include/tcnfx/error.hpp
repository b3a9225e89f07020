#pragma once

#include <stdexcept>
#include <string>

namespace tcnfx {

enum class ErrorKind {
  InvalidConfig,
  ConfigTooLarge,
  InsufficientContext,
  InvalidInput,
  ChannelMismatch,
  Io,
  Format,
  UnsupportedVersion,
};

const char* to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library. `field()` names the offending
/// configuration key or input when one applies, and is empty otherwise.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, std::string field, const std::string& reason);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& field() const noexcept { return field_; }
  const std::string& reason() const noexcept { return reason_; }

private:
  ErrorKind kind_;
  std::string field_;
  std::string reason_;
};

} // namespace tcnfx
