#pragma once

#include <stdexcept>
#include <string>

namespace fluxlock {

// Machine-readable failure categories.  Every exception thrown by the library
// carries one of these so callers (and the CLI) can react without parsing
// message text.
enum class ErrorCode {
  invalid_dimension,
  invalid_parameters,
  invalid_value,
  ambiguous_cooldown_flux,
  grid_too_small,
  unsolvable_target,
  no_peak,
  no_decay,
  undefined_t2e,
  cannot_seed,
  malformed_input,
  no_convergence,
  fit_failed,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_dimension: return "invalid-dimension";
    case ErrorCode::invalid_parameters: return "invalid-parameters";
    case ErrorCode::invalid_value: return "invalid-value";
    case ErrorCode::ambiguous_cooldown_flux: return "ambiguous-cooldown-flux";
    case ErrorCode::grid_too_small: return "grid-too-small";
    case ErrorCode::unsolvable_target: return "unsolvable-target";
    case ErrorCode::no_peak: return "no-peak";
    case ErrorCode::no_decay: return "no-decay";
    case ErrorCode::undefined_t2e: return "undefined-t2e";
    case ErrorCode::cannot_seed: return "cannot-seed";
    case ErrorCode::malformed_input: return "malformed-input";
    case ErrorCode::no_convergence: return "no-convergence";
    case ErrorCode::fit_failed: return "fit-failed";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fluxlock
