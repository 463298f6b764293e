#pragma once

#include <stdexcept>
#include <string>

namespace catqfi {

enum class ErrorKind {
  invalid_argument,
  dimension_mismatch,
  cutoff_too_small,
  undefined_for_vacuum,
  trace_loss,
  not_noon_supported,
  zero_norm,
  series_overflow,
  tail_too_heavy,
  qfi_route_mismatch,
  negative_spectrum,
  out_of_range,
  non_monotone_grid,
  no_sign_change,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::dimension_mismatch: return "dimension-mismatch";
    case ErrorKind::cutoff_too_small: return "cutoff-too-small";
    case ErrorKind::undefined_for_vacuum: return "undefined-for-vacuum";
    case ErrorKind::trace_loss: return "trace-loss";
    case ErrorKind::not_noon_supported: return "not-noon-supported";
    case ErrorKind::zero_norm: return "zero-norm";
    case ErrorKind::series_overflow: return "series-overflow";
    case ErrorKind::tail_too_heavy: return "tail-too-heavy";
    case ErrorKind::qfi_route_mismatch: return "qfi-route-mismatch";
    case ErrorKind::negative_spectrum: return "negative-spectrum";
    case ErrorKind::out_of_range: return "out-of-range";
    case ErrorKind::non_monotone_grid: return "non-monotone-grid";
    case ErrorKind::no_sign_change: return "no-sign-change";
  }
  return "unknown";
}

/// Every failure raised by the library. `kind()` is stable and machine
/// readable; `what()` carries the human-oriented detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// Argument/config problems as opposed to numerical breakdown.
  bool is_usage_error() const noexcept {
    return kind_ == ErrorKind::invalid_argument || kind_ == ErrorKind::dimension_mismatch ||
           kind_ == ErrorKind::out_of_range || kind_ == ErrorKind::no_sign_change ||
           kind_ == ErrorKind::non_monotone_grid;
  }

 private:
  ErrorKind kind_;
};

}  // namespace catqfi
