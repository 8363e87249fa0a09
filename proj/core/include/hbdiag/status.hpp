#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace hbdiag {

enum class DiagnosisStatus { normal = 0, memoryleak = 1, shutdown = 2 };

inline constexpr std::array<DiagnosisStatus, 3> kAllStatuses = {
    DiagnosisStatus::normal, DiagnosisStatus::memoryleak, DiagnosisStatus::shutdown};

constexpr std::size_t index_of(DiagnosisStatus s) noexcept {
  return static_cast<std::size_t>(s);
}

std::string_view to_string(DiagnosisStatus s) noexcept;
std::optional<DiagnosisStatus> parse_status(std::string_view text) noexcept;

}  // namespace hbdiag
