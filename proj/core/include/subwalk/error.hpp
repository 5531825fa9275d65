#pragma once

#include <stdexcept>
#include <string>

namespace subwalk {

enum class ErrorKind {
  configuration,  // bad parameters for a catalog entry or a config file
  domain,         // argument outside an operation's domain
  capability,     // operation not available for this input kind
  numeric,        // numerical refusal: defect, convergence, conditioning
  validation,     // a computed object violates its invariants
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

/// CLI exit code for an error: 2 for user-side errors, 3 for numeric failure.
int exit_code(ErrorKind kind) noexcept;

}  // namespace subwalk
