#include "hbdiag/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hbdiag/errors.hpp"

namespace hbdiag {

using nlohmann::json;

std::string_view to_string(Split s) noexcept {
  switch (s) {
    case Split::train: return "train";
    case Split::test: return "test";
    case Split::unassigned: return "unassigned";
  }
  return "unassigned";
}

namespace {

const std::set<std::string> kEntryKeys = {"log_path", "label", "profile", "split", "victims", "seed"};

json entry_to_json(const ManifestEntry& e) {
  json j;
  j["log_path"] = e.log_path;
  j["label"] = std::string(to_string(e.label));
  j["profile"] = e.profile;
  if (e.split != Split::unassigned) j["split"] = std::string(to_string(e.split));
  if (!e.victims.empty()) j["victims"] = e.victims;
  j["seed"] = e.seed;
  return j;
}

ManifestEntry entry_from_json(const std::string& run, const json& j, const std::string& source) {
  auto bad = [&](const std::string& what) {
    throw Error(ErrorKind::parse, source + ": run '" + run + "': " + what);
  };
  if (!j.is_object()) bad("entry must be an object");
  for (const auto& [key, _] : j.items()) {
    if (!kEntryKeys.contains(key)) bad("unknown key '" + key + "'");
  }
  ManifestEntry e;
  if (!j.contains("log_path") || !j["log_path"].is_string()) bad("missing string 'log_path'");
  e.log_path = j["log_path"].get<std::string>();
  if (!j.contains("label") || !j["label"].is_string()) bad("missing string 'label'");
  auto label = parse_status(j["label"].get<std::string>());
  if (!label) bad("unknown label '" + j["label"].get<std::string>() + "'");
  e.label = *label;
  if (!j.contains("profile") || !j["profile"].is_string()) bad("missing string 'profile'");
  e.profile = j["profile"].get<std::string>();
  if (j.contains("split")) {
    const auto s = j["split"].get<std::string>();
    if (s == "train") e.split = Split::train;
    else if (s == "test") e.split = Split::test;
    else if (s != "unassigned") bad("unknown split '" + s + "'");
  }
  if (j.contains("victims")) {
    if (!j["victims"].is_array()) bad("'victims' must be an array");
    e.victims = j["victims"].get<std::vector<ThreadId>>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) bad("'seed' must be a non-negative integer");
    e.seed = j["seed"].get<std::uint64_t>();
  }
  return e;
}

}  // namespace

std::string manifest_to_string(const Manifest& manifest) {
  json j = json::object();
  for (const auto& [name, entry] : manifest) j[name] = entry_to_json(entry);
  return j.dump(2) + "\n";
}

Manifest manifest_from_string(const std::string& text, const std::string& source_name) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::parse, source_name + ": " + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::parse, source_name + ": manifest must be an object");
  Manifest m;
  try {
    for (const auto& [name, value] : j.items()) m[name] = entry_from_json(name, value, source_name);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse, source_name + ": " + e.what());
  }
  return m;
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open manifest " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return manifest_from_string(ss.str(), path.string());
}

void write_manifest(const std::filesystem::path& path, const Manifest& manifest) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write manifest " + path.string());
  out << manifest_to_string(manifest);
  if (!out) throw Error(ErrorKind::io, "write failed for " + path.string());
}

std::filesystem::path resolve_log_path(const std::filesystem::path& manifest_path,
                                       const ManifestEntry& entry) {
  std::filesystem::path log(entry.log_path);
  if (log.is_absolute()) return log;
  return manifest_path.parent_path() / log;
}

DiagnosisStatus thread_label(const ManifestEntry& entry, ThreadId thread) {
  // A shutdown run without recorded victims labels every thread.
  if (entry.label != DiagnosisStatus::shutdown || entry.victims.empty()) return entry.label;
  const bool victim = std::find(entry.victims.begin(), entry.victims.end(), thread) !=
                      entry.victims.end();
  return victim ? DiagnosisStatus::shutdown : DiagnosisStatus::normal;
}

}  // namespace hbdiag
