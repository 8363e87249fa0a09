#include "hbdiag/errors.hpp"

#include "hbdiag/status.hpp"

namespace hbdiag {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::parse: return "parse error";
    case ErrorKind::validation: return "validation error";
    case ErrorKind::empty_input: return "empty input";
    case ErrorKind::insufficient_data: return "insufficient data";
    case ErrorKind::degenerate_timing: return "degenerate timing";
    case ErrorKind::conditioning: return "ill-conditioned fit";
    case ErrorKind::undefined_r_squared: return "undefined R-squared";
    case ErrorKind::no_overlap: return "no overlap";
    case ErrorKind::degenerate_reference: return "degenerate reference";
    case ErrorKind::infeasible_band: return "infeasible band";
    case ErrorKind::length_mismatch: return "length mismatch";
    case ErrorKind::misuse: return "misuse";
    case ErrorKind::degenerate_injection: return "degenerate injection";
    case ErrorKind::insufficient_training: return "insufficient training data";
    case ErrorKind::configuration: return "configuration error";
    case ErrorKind::io: return "I/O error";
    case ErrorKind::degenerate_baseline: return "degenerate baseline";
  }
  return "error";
}

std::string_view to_string(DiagnosisStatus s) noexcept {
  switch (s) {
    case DiagnosisStatus::normal: return "normal";
    case DiagnosisStatus::memoryleak: return "memoryleak";
    case DiagnosisStatus::shutdown: return "shutdown";
  }
  return "normal";
}

std::optional<DiagnosisStatus> parse_status(std::string_view text) noexcept {
  for (auto s : kAllStatuses) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

}  // namespace hbdiag
