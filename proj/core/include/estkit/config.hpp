#pragma once

#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>
#include <vector>

#include "estkit/experiments.hpp"

namespace estkit {

// Resolved sweep configuration. Loaded from JSON or TOML (by extension) and
// validated: unknown keys are rejected by name, defaults are trials=50,
// eps=0, rows=Gaussian.
struct SweepConfig {
  std::string experiment;  // recover | dict-recover | lowrank | complete | onebit | project
  Index n = 0;
  std::vector<long> m_grid;
  Index s = 4;
  Index rank = 1;
  Index d1 = 0, d2 = 0;
  double eps = 0.0;
  long trials = 50;
  std::uint64_t seed = 0;
  std::optional<SetDescriptor> set;
  RowKind rows = RowKind::Gaussian;
  LinkFunction link = LinkFunction::sign_link();
  NoiseSpec noise = NoiseSpec::none();
  std::string truth = "sparse";  // sparse | effective
  SolverPath solver = SolverPath::Auto;
  std::string output;
  std::string format = "csv";  // csv | json
  int workers = 0;             // 0 = auto
};

SweepConfig config_from_json(const nlohmann::json& doc);
SweepConfig load_config(const std::string& path, const nlohmann::json& overrides);
nlohmann::json config_to_json(const SweepConfig& cfg);

// Minimal TOML reader covering the config schema: [table] headers, key =
// value with strings, numbers, booleans, arrays and inline tables, and #
// comments. Produces the same JSON document shape as the .json loader.
nlohmann::json toml_to_json(const std::string& text);

struct SweepResult {
  std::vector<SweepRecord> records;
  ScalingFit fit;
};

SweepResult run_sweep(const SweepConfig& cfg);

// CSV schema:
// experiment,n,m,s,r,eps,trial_count,err_mean,err_median,err_q90,bound_value,seed
void emit(const std::vector<SweepRecord>& records, const ScalingFit& fit,
          const std::string& format, const std::string& path);

std::string format_double(double v);  // 17 significant digits, round-trip exact

}  // namespace estkit
