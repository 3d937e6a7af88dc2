#pragma once

#include <stdexcept>
#include <string>

namespace compose {

enum class ErrorKind {
  Syntax,      // text does not conform to the term grammar
  Validation,  // structurally well-formed input violating a model invariant
  Registry,    // vocabulary declaration problem (duplicate names, bad reverse pairing, ...)
  Backend,     // evaluation-time failure raised by a backend (dimension mismatch, ...)
  Io,          // file / JSON problems
  Internal,
};

/// The single exception type used across the library. `kind()` lets callers
/// (notably the CLI) map failures onto exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace compose
