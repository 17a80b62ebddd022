#pragma once

// JSON model/partition configuration and report serialization.
//
// Model:     {"family": "logistic" | "asymmetric_logistic" | "factor_pareto" | "gaussian",
//             "d", "alpha", "alphas", "beta" (q x d), "lambda" (d x m),
//             "sigma" (d x d) or "rho" (equicorrelation), "labels" (optional)}
// Partition: {"blocks": [{"name": "...", "members": ["label", ...]}, ...]}
// Matrices are nested row arrays or flat row-major arrays.

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "blockfi/core.hpp"
#include "blockfi/estimation.hpp"
#include "blockfi/fragility.hpp"
#include "blockfi/models.hpp"
#include "blockfi/montecarlo.hpp"
#include "blockfi/taildep.hpp"

namespace blockfi {

using Json = nlohmann::json;

/// Parses a JSON file; unreadable or malformed files are configuration errors.
Json read_json_file(const std::string& path);

struct ModelConfig {
  MevModel model;
  std::vector<std::string> labels;
};

ModelConfig model_from_json(const Json& j);
Json model_to_json(const MevModel& model, std::span<const std::string> labels);

std::vector<BlockConfig> partition_config_from_json(const Json& j);
Partition partition_from_json(const Json& j, std::span<const std::string> labels);

Json to_json(const ExceedanceDistribution& dist);
Json to_json(const FragilityBounds& bounds);
Json to_json(const FragilityReport& report);
/// Subsets are arrays of 1-based block positions.
Json to_json(const TailDependenceSet& lambda);
Json to_json(const EtaBounds& bounds);
Json to_json(const EtaReport& report);
Json to_json(const EpsEstimate& e);
Json to_json(const ScalarEstimate& e);
Json to_json(const FragilityEstimate& e);
Json to_json(const EtaEstimate& e);
Json to_json(const McReport& report);

}  // namespace blockfi
