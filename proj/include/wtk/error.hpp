// error.hpp
#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wtk {

enum class ErrorCode {
  Io,
  InvalidUtf8,
  MalformedRecord,
  NonMonotonicSeq,
  UnknownTrigger,
  DanglingDelta,
  InputTooLarge,
  LengthMismatch,
  DuplicateName,
  OrphanAction,
  EmptySchema,
  SizeMismatch,
  UnknownLabel,
  SpanOutOfRange,
  SchemaMismatch,
  SessionMismatch,
  InvalidLabelCombination,
  EmptyInput,
  ReplayDivergence,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    // clang-format off
    case ErrorCode::Io:                      return "Io";
    case ErrorCode::InvalidUtf8:             return "InvalidUtf8";
    case ErrorCode::MalformedRecord:         return "MalformedRecord";
    case ErrorCode::NonMonotonicSeq:         return "NonMonotonicSeq";
    case ErrorCode::UnknownTrigger:          return "UnknownTrigger";
    case ErrorCode::DanglingDelta:           return "DanglingDelta";
    case ErrorCode::InputTooLarge:           return "InputTooLarge";
    case ErrorCode::LengthMismatch:          return "LengthMismatch";
    case ErrorCode::DuplicateName:           return "DuplicateName";
    case ErrorCode::OrphanAction:            return "OrphanAction";
    case ErrorCode::EmptySchema:             return "EmptySchema";
    case ErrorCode::SizeMismatch:            return "SizeMismatch";
    case ErrorCode::UnknownLabel:            return "UnknownLabel";
    case ErrorCode::SpanOutOfRange:          return "SpanOutOfRange";
    case ErrorCode::SchemaMismatch:          return "SchemaMismatch";
    case ErrorCode::SessionMismatch:         return "SessionMismatch";
    case ErrorCode::InvalidLabelCombination: return "InvalidLabelCombination";
    case ErrorCode::EmptyInput:              return "EmptyInput";
    case ErrorCode::ReplayDivergence:        return "ReplayDivergence";
    // clang-format on
  }
  return "Unknown";
}

/// Every failure raised by the toolkit. `line()` is set for errors that can
/// be attributed to a 1-based line of an input file.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, std::optional<std::size_t> line = std::nullopt)
      : std::runtime_error(format(code, what, line)), code_(code), line_(line) {}

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  static std::string format(ErrorCode code, const std::string& what, std::optional<std::size_t> line) {
    std::string out(to_string(code));
    if (line) out += " (line " + std::to_string(*line) + ")";
    if (!what.empty()) out += ": " + what;
    return out;
  }

  ErrorCode code_;
  std::optional<std::size_t> line_;
};

}  // namespace wtk
