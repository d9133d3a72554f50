#pragma once

#include <stdexcept>
#include <string>

namespace unred {

/// Error categories; each maps to a CLI exit code.
enum class ErrorKind {
  validation,  // bad input or configuration (exit 2)
  numerical,   // degenerate geometry or blow-up during a computation (exit 3)
  io,          // filesystem failures (exit 4)
};

int exit_code(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorKind::validation, what) {}
};

/// A curve whose speed vanishes somewhere, so its frame is undefined.
class DegenerateCurveError : public Error {
 public:
  explicit DegenerateCurveError(const std::string& what)
      : Error(ErrorKind::numerical, what) {}
};

/// Non-finite or runaway values during time stepping or descent.
class BlowUpError : public Error {
 public:
  explicit BlowUpError(const std::string& what)
      : Error(ErrorKind::numerical, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

/// Rethrows `e` with `context` prepended, preserving its kind.
[[noreturn]] void rethrow_with_context(const Error& e, const std::string& context);

}  // namespace unred
