#include "hbdiag/json_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "hbdiag/errors.hpp"

namespace hbdiag {

using nlohmann::json;

namespace {

constexpr const char* kFeatureNames[] = {"dtw", "lb", "gtr", "ltr", "ghr", "lhr"};

template <class T>
T get_field(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorKind::parse, std::string("missing key '") + key + "'");
  return j.at(key).get<T>();
}

}  // namespace

void to_json(json& j, const Interval& v) { j = json::array({v.lo, v.hi}); }

void from_json(const json& j, Interval& v) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorKind::parse, "interval must be [lo, hi]");
  v.lo = j[0].get<double>();
  v.hi = j[1].get<double>();
}

void to_json(json& j, const NormalRanges& v) {
  j = json{{"dtw", v.dtw}, {"lb", v.lb}, {"gtr", v.gtr},
           {"ltr", v.ltr}, {"ghr", v.ghr}, {"lhr", v.lhr}};
}

void from_json(const json& j, NormalRanges& v) {
  if (!j.is_object()) throw Error(ErrorKind::parse, "ranges must be an object");
  const std::set<std::string> known(std::begin(kFeatureNames), std::end(kFeatureNames));
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw Error(ErrorKind::parse, "unknown feature '" + key + "'");
  }
  v.dtw = get_field<Interval>(j, "dtw");
  v.lb = get_field<Interval>(j, "lb");
  v.gtr = get_field<Interval>(j, "gtr");
  v.ltr = get_field<Interval>(j, "ltr");
  v.ghr = get_field<Interval>(j, "ghr");
  v.lhr = get_field<Interval>(j, "lhr");
  v.validate();
}

void to_json(json& j, const FeatureVector& v) {
  j = json{{"gtr", v.gtr}, {"ltr", v.ltr}, {"ghr", v.ghr},
           {"lhr", v.lhr}, {"dtw", v.dtw}, {"lb", v.lb}};
}

void to_json(json& j, const FeatureConfig& v) {
  j = json{{"window", v.window.size},
           {"stride", v.window.stride},
           {"rate_window", v.rate_window},
           {"grid_size", v.grid_size},
           {"lhr_eps", v.lhr_eps},
           {"r2_threshold", v.fit.r2_threshold},
           {"max_degree", v.fit.max_degree}};
}

void from_json(const json& j, FeatureConfig& v) {
  v.window.size = get_field<std::size_t>(j, "window");
  v.window.stride = get_field<std::size_t>(j, "stride");
  v.rate_window = get_field<std::size_t>(j, "rate_window");
  v.grid_size = get_field<std::size_t>(j, "grid_size");
  v.lhr_eps = get_field<double>(j, "lhr_eps");
  v.fit.r2_threshold = get_field<double>(j, "r2_threshold");
  v.fit.max_degree = get_field<int>(j, "max_degree");
  v.validate();
}

void to_json(json& j, const EvaluationReport& v) {
  j = json::object();
  json classes = json::object();
  for (auto s : kAllStatuses) {
    const auto& m = v.metrics(s);
    classes[std::string(to_string(s))] = {
        {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"support", m.support}};
  }
  j["classes"] = classes;
  j["macro_f"] = v.macro_f;
  j["total"] = v.total;
  json confusion = json::object();
  for (auto l : kAllStatuses) {
    json row = json::object();
    for (auto p : kAllStatuses) row[std::string(to_string(p))] = v.confusion[index_of(l)][index_of(p)];
    confusion[std::string(to_string(l))] = row;
  }
  j["confusion"] = confusion;
}

nlohmann::json model_to_json(const TrainedModel& model) {
  json j;
  j["confidence"] = model.confidence;
  j["features"] = model.features;
  json profiles = json::object();
  for (const auto& [name, p] : model.profiles) {
    profiles[name] = {{"reference_run", p.reference_run},
                      {"reference_log", p.reference_log},
                      {"training_vectors", p.training_vectors},
                      {"ranges", p.ranges}};
  }
  j["profiles"] = profiles;
  return j;
}

void write_model(const std::filesystem::path& path, const TrainedModel& model) {
  auto j = model_to_json(model);
  // Reference logs are stored relative to the ranges file.
  const auto base = std::filesystem::absolute(path).parent_path();
  for (auto& [name, p] : j["profiles"].items()) {
    const auto log = std::filesystem::absolute(p["reference_log"].get<std::string>());
    p["reference_log"] = std::filesystem::relative(log, base).generic_string();
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::io, "write failed for " + path.string());
}

TrainedModel read_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open ranges file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  TrainedModel model;
  try {
    const auto j = json::parse(ss.str());
    model.confidence = get_field<double>(j, "confidence");
    model.features = get_field<FeatureConfig>(j, "features");
    const auto profiles = get_field<json>(j, "profiles");
    for (const auto& [name, p] : profiles.items()) {
      TrainedProfile tp;
      tp.reference_run = get_field<std::string>(p, "reference_run");
      const std::filesystem::path log = get_field<std::string>(p, "reference_log");
      tp.reference_log = (log.is_absolute() ? log : path.parent_path() / log).string();
      tp.training_vectors = get_field<std::size_t>(p, "training_vectors");
      tp.ranges = get_field<NormalRanges>(p, "ranges");
      tp.reference = by_thread(ingest_log(tp.reference_log));
      model.profiles.emplace(name, std::move(tp));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse, path.string() + ": " + e.what());
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::parse) throw;
    throw Error(ErrorKind::parse, path.string() + ": " + e.what());
  }
  return model;
}

}  // namespace hbdiag
