#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "hbdiag/heartbeat.hpp"
#include "hbdiag/status.hpp"

namespace hbdiag {

enum class Split { unassigned, train, test };

std::string_view to_string(Split s) noexcept;

/// One labelled run in a dataset manifest.
struct ManifestEntry {
  std::string log_path;  // relative to the manifest's directory unless absolute
  DiagnosisStatus label = DiagnosisStatus::normal;
  std::string profile;
  Split split = Split::unassigned;
  std::vector<ThreadId> victims;  // threads carrying a shutdown; empty otherwise
  std::uint64_t seed = 0;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

/// run name -> entry. Ordered so serialization is byte-stable.
using Manifest = std::map<std::string, ManifestEntry>;

Manifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const Manifest& manifest);
std::string manifest_to_string(const Manifest& manifest);
Manifest manifest_from_string(const std::string& text, const std::string& source_name);

std::filesystem::path resolve_log_path(const std::filesystem::path& manifest_path,
                                       const ManifestEntry& entry);

/// Ground-truth status per thread: shutdown runs mark only their victims.
DiagnosisStatus thread_label(const ManifestEntry& entry, ThreadId thread);

}  // namespace hbdiag
