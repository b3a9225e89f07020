#include "tcnfx/error.hpp"

namespace tcnfx {

const char* to_string(ErrorKind kind) noexcept
{
  switch (kind) {
  case ErrorKind::InvalidConfig: return "invalid configuration";
  case ErrorKind::ConfigTooLarge: return "configuration too large";
  case ErrorKind::InsufficientContext: return "insufficient context";
  case ErrorKind::InvalidInput: return "invalid input";
  case ErrorKind::ChannelMismatch: return "channel mismatch";
  case ErrorKind::Io: return "i/o error";
  case ErrorKind::Format: return "format error";
  case ErrorKind::UnsupportedVersion: return "unsupported version";
  }
  return "error";
}

namespace {
std::string compose(ErrorKind kind, const std::string& field, const std::string& reason)
{
  std::string msg = to_string(kind);
  if (!field.empty())
    msg += " [" + field + "]";
  msg += ": " + reason;
  return msg;
}
} // namespace

Error::Error(ErrorKind kind, std::string field, const std::string& reason)
: std::runtime_error(compose(kind, field, reason))
, kind_(kind)
, field_(std::move(field))
, reason_(reason)
{
}

} // namespace tcnfx
