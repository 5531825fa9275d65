#include "subwalk/error.hpp"

namespace subwalk {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::configuration: return "configuration error";
    case ErrorKind::domain: return "domain error";
    case ErrorKind::capability: return "capability error";
    case ErrorKind::numeric: return "numeric error";
    case ErrorKind::validation: return "validation error";
  }
  return "error";
}

void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

int exit_code(ErrorKind kind) noexcept {
  return kind == ErrorKind::numeric ? 3 : 2;
}

}  // namespace subwalk
