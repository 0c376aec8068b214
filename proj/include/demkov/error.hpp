#pragma once

#include <stdexcept>
#include <string>

namespace demkov {

enum class ErrorKind {
  domain,           // argument outside the operation's domain
  pole,             // gamma function or series parameter at a pole
  non_convergence,  // series or iteration budget exhausted
  degenerate,       // parameters make a fundamental set linearly dependent
  singular_system,  // matching system numerically singular
  step_limit,       // ODE integrator exceeded max_steps
  tolerance,        // ODE integrator could not meet tolerance
  inversion,        // Bloch-vector reconstruction unavailable
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::domain: return "domain error";
    case ErrorKind::pole: return "pole error";
    case ErrorKind::non_convergence: return "non-convergence";
    case ErrorKind::degenerate: return "degenerate parameters";
    case ErrorKind::singular_system: return "singular system";
    case ErrorKind::step_limit: return "step limit exceeded";
    case ErrorKind::tolerance: return "tolerance not met";
    case ErrorKind::inversion: return "inversion unavailable";
  }
  return "error";
}

/// Every failure raised by the library carries one of the kinds above, so
/// callers (the CLI in particular) can map failures to exit codes without
/// parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace demkov
