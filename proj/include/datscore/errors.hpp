#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace datscore {

enum class ErrorCode {
  Parse,
  Validation,
  UnsupportedLanguage,
  EmptyInput,
  BackendUnavailable,
  TranslateUnsupported,
  MissingTrace,
  ExclusionLimit,
  InsufficientData,
  ZeroVariance,
  Contract,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Malformed input, positioned at a 1-based line of the named source.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& message)
      : Error(ErrorCode::Parse, source + ":" + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// True for failures that originate in a probability backend and make a single
// example unscorable without invalidating the run.
inline bool is_backend_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnsupportedLanguage:
    case ErrorCode::EmptyInput:
    case ErrorCode::BackendUnavailable:
    case ErrorCode::TranslateUnsupported:
    case ErrorCode::MissingTrace:
      return true;
    default:
      return false;
  }
}

}  // namespace datscore
