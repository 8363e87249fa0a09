#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "hbdiag/diagnosis.hpp"
#include "hbdiag/features.hpp"
#include "hbdiag/workflow.hpp"

namespace hbdiag {

void to_json(nlohmann::json& j, const Interval& v);
void from_json(const nlohmann::json& j, Interval& v);

// feature name -> [lo, hi]
void to_json(nlohmann::json& j, const NormalRanges& v);
void from_json(const nlohmann::json& j, NormalRanges& v);

void to_json(nlohmann::json& j, const FeatureVector& v);
void to_json(nlohmann::json& j, const FeatureConfig& v);
void from_json(const nlohmann::json& j, FeatureConfig& v);

void to_json(nlohmann::json& j, const EvaluationReport& v);

nlohmann::json model_to_json(const TrainedModel& model);

/// Reads ranges.json and reloads each profile's reference log.
TrainedModel read_model(const std::filesystem::path& path);
void write_model(const std::filesystem::path& path, const TrainedModel& model);

}  // namespace hbdiag
