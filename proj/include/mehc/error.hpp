#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mehc {

enum class ErrorKind {
    InvalidArgument,
    InvalidMdp,
    ParseError,
    GainNotConstant,
    NoConvergence,
    EnumerationTooLarge,
    ShapingOutOfBounds,
    PreconditionViolated,
    NoValidPotential,
    IoError,
};

constexpr std::string_view error_name(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidMdp: return "InvalidMdp";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::GainNotConstant: return "GainNotConstant";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::EnumerationTooLarge: return "EnumerationTooLarge";
    case ErrorKind::ShapingOutOfBounds: return "ShapingOutOfBounds";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::NoValidPotential: return "NoValidPotential";
    case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

/// Domain error carrying one of the named error kinds. The CLI prints
/// `name(): what()` and exits with code 1.
class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    std::string_view name() const noexcept { return error_name(kind_); }

  private:
    ErrorKind kind_;
};

} // namespace mehc
