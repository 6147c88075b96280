#pragma once

#include <nlohmann/json.hpp>

#include "estkit/estimators.hpp"
#include "estkit/experiments.hpp"
#include "estkit/geometry.hpp"
#include "estkit/sets.hpp"

namespace estkit {

nlohmann::json to_json(const SetDescriptor& desc);
SetDescriptor set_descriptor_from_json(const nlohmann::json& j);

nlohmann::json to_json(const WidthEstimate& w);
nlohmann::json to_json(const SolveDiagnostics& d);
nlohmann::json to_json(const EstimateReport& r);
nlohmann::json to_json(const SweepRecord& r);
SweepRecord sweep_record_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ScalingFit& f);

}  // namespace estkit
