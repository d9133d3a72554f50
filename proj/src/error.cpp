#include "unred/error.hpp"

namespace unred {

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::validation:
      return 2;
    case ErrorKind::numerical:
      return 3;
    case ErrorKind::io:
      return 4;
  }
  return 1;
}

void rethrow_with_context(const Error& e, const std::string& context) {
  const std::string msg = context + ": " + e.what();
  switch (e.kind()) {
    case ErrorKind::validation:
      throw ValidationError(msg);
    case ErrorKind::numerical:
      if (dynamic_cast<const DegenerateCurveError*>(&e) != nullptr) {
        throw DegenerateCurveError(msg);
      }
      throw BlowUpError(msg);
    case ErrorKind::io:
      throw IoError(msg);
  }
  throw Error(e.kind(), msg);
}

}  // namespace unred
