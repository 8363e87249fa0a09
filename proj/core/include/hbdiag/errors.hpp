#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hbdiag {

enum class ErrorKind {
  parse,
  validation,
  empty_input,
  insufficient_data,
  degenerate_timing,
  conditioning,
  undefined_r_squared,
  no_overlap,
  degenerate_reference,
  infeasible_band,
  length_mismatch,
  misuse,
  degenerate_injection,
  insufficient_training,
  configuration,
  io,
  degenerate_baseline,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace hbdiag
