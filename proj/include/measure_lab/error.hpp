#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace measure_lab {

enum class ErrorKind {
  NotMonic,
  NotPisot,
  Reducible,
  PrecisionExhausted,
  DivisionByZero,
  SchemaError,
  DuplicateEdge,
  UnknownState,
  LabelOutsideAlphabet,
  CapExceeded,
  NotPrimitive,
  NotStronglyConnected,
  EmptyInitialSet,
  DeadState,
  UnknownCommand,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotMonic: return "NotMonic";
    case ErrorKind::NotPisot: return "NotPisot";
    case ErrorKind::Reducible: return "Reducible";
    case ErrorKind::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorKind::DivisionByZero: return "DivisionByZero";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::DuplicateEdge: return "DuplicateEdge";
    case ErrorKind::UnknownState: return "UnknownState";
    case ErrorKind::LabelOutsideAlphabet: return "LabelOutsideAlphabet";
    case ErrorKind::CapExceeded: return "CapExceeded";
    case ErrorKind::NotPrimitive: return "NotPrimitive";
    case ErrorKind::NotStronglyConnected: return "NotStronglyConnected";
    case ErrorKind::EmptyInitialSet: return "EmptyInitialSet";
    case ErrorKind::DeadState: return "DeadState";
    case ErrorKind::UnknownCommand: return "UnknownCommand";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above so
/// callers (the CLI in particular) can map it to an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace measure_lab
