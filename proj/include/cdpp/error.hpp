#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cdpp {

enum class ErrorKind {
  Config,
  DegenerateData,
  ShapeMismatch,
  Parse,
  NumericalFailure,
  ResampleExhausted,
  NoCandidates,
  DegenerateScatter,
  GenerationExhausted,
};

inline std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Config: return "ConfigError";
    case ErrorKind::DegenerateData: return "DegenerateData";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::ResampleExhausted: return "ResampleExhausted";
    case ErrorKind::NoCandidates: return "NoCandidates";
    case ErrorKind::DegenerateScatter: return "DegenerateScatter";
    case ErrorKind::GenerationExhausted: return "GenerationExhausted";
  }
  return "Error";
}

// Every failure raised by the library carries a kind so callers (the CLI in
// particular) can map it to an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Process exit status for the command-line tool: 2 config, 3 data, 4 numerical.
inline int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Config:
      return 2;
    case ErrorKind::DegenerateData:
    case ErrorKind::ShapeMismatch:
    case ErrorKind::Parse:
    case ErrorKind::NoCandidates:
      return 3;
    case ErrorKind::NumericalFailure:
    case ErrorKind::ResampleExhausted:
    case ErrorKind::DegenerateScatter:
    case ErrorKind::GenerationExhausted:
      return 4;
  }
  return 1;
}

namespace detail {

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, ErrorKind kind, const char* what) {
  if (!condition) fail(kind, what);
}

}  // namespace detail
}  // namespace cdpp
