#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "gmc/synthbench.hpp"

namespace gmc {

/// Invalid experiment configuration (unknown key, wrong type, bad value).
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything a training run or suite needs, as read from a JSON config.
/// Field names in the JSON mirror the struct members; unknown keys are
/// rejected so typos fail loudly instead of silently using defaults.
struct ExperimentConfig {
  DatasetConfig dataset;
  TrainOptions train;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
};

/// Parses a config from JSON text. Missing keys keep their defaults; unknown
/// keys throw config_error naming the key.
ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::string& path);

LossKind parse_loss_kind(const std::string& name);
ModelKind parse_model_kind(const std::string& name);
SuiteKind parse_suite_kind(const std::string& name);

nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg);
nlohmann::json train_report_to_json(const TrainReport& report);
nlohmann::json suite_result_to_json(const SuiteResult& result);

/// Per-epoch curves as CSV with a header row; one row per epoch.
std::string train_report_curves_csv(const TrainReport& report);

/// Median test-SROCC curves of every arm, one row per epoch.
std::string suite_curves_csv(const SuiteResult& result);

/// Minimal JSON-schema subset validator covering the constructs used by the
/// schemas shipped in schemas/: type, properties, required,
/// additionalProperties (boolean), items, and enum. Returns human-readable
/// violations ("$.arms[0].name: expected string"); empty means valid.
std::vector<std::string> validate_against_schema(const nlohmann::json& value,
                                                 const nlohmann::json& schema);

}  // namespace gmc
