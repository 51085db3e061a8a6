#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vism {

enum class Errc {
  InvalidArgument,
  ParseError,
  ConfigError,
  NonConvergence,
  NoConvergence,
  IndexOutOfRange,
  OutOfDomain,
  UnsupportedExponent,
  UnsupportedOrder,
  NotSymmetric,
  NotBlockDiagonal,
  BracketInvalid,
  ReferenceRequired,
  ReferenceUnavailable,
  InsufficientAnchors,
  NonMonotoneAnchors,
  DivisionByZero,
  ZeroReference,
};

constexpr std::string_view errc_name(Errc e) noexcept {
  switch (e) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::ParseError: return "ParseError";
    case Errc::ConfigError: return "ConfigError";
    case Errc::NonConvergence: return "NonConvergence";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::OutOfDomain: return "OutOfDomain";
    case Errc::UnsupportedExponent: return "UnsupportedExponent";
    case Errc::UnsupportedOrder: return "UnsupportedOrder";
    case Errc::NotSymmetric: return "NotSymmetric";
    case Errc::NotBlockDiagonal: return "NotBlockDiagonal";
    case Errc::BracketInvalid: return "BracketInvalid";
    case Errc::ReferenceRequired: return "ReferenceRequired";
    case Errc::ReferenceUnavailable: return "ReferenceUnavailable";
    case Errc::InsufficientAnchors: return "InsufficientAnchors";
    case Errc::NonMonotoneAnchors: return "NonMonotoneAnchors";
    case Errc::DivisionByZero: return "DivisionByZero";
    case Errc::ZeroReference: return "ZeroReference";
  }
  return "Unknown";
}

/// Configuration and input problems, as opposed to numerical failures.
constexpr bool is_config_error(Errc e) noexcept {
  switch (e) {
    case Errc::InvalidArgument:
    case Errc::ParseError:
    case Errc::ConfigError:
    case Errc::IndexOutOfRange:
    case Errc::OutOfDomain:
    case Errc::UnsupportedExponent:
    case Errc::UnsupportedOrder:
    case Errc::ReferenceRequired:
    case Errc::ReferenceUnavailable:
    case Errc::InsufficientAnchors:
    case Errc::NonMonotoneAnchors:
      return true;
    default:
      return false;
  }
}

/// Library exception. `module()` names the component that raised it so the
/// CLI can report where a failure came from.
class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string module, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + " [" + module + "]: " + what),
        code_(code),
        module_(std::move(module)) {}

  Errc code() const noexcept { return code_; }
  const std::string& module() const noexcept { return module_; }

 private:
  Errc code_;
  std::string module_;
};

}  // namespace vism
