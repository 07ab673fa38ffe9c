// experiment.hpp -- experiment configuration, dispatch, and artifact emission
// (CSV tables, plot manifests, versioned summary JSON).
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "gasketlab/geometry.hpp"

namespace gasketlab {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  GasketSpec spec;
  std::string kind;           // build scale harmonic singularity walk metric approx hke
  int depth = 0;              // 0 means the full level schedule
  std::uint64_t seed = 12345;
  std::string out_dir;        // empty disables artifact files
};

// JSON schema: {"dimension": int>=2, "levels": [int>=2,...] nonempty,
//               "depth": int (optional), "seed": int (optional),
//               "kind": string (optional), "out": string (optional)}
// Violations throw ConfigError naming the offending field.
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_json(const nlohmann::json& j);

struct ExperimentResult {
  bool ok = true;
  nlohmann::json summary;
};

// runs one experiment kind; summary carries fitted constants,
// classifications, and per-invariant pass flags mirrored by ok
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// runs every kind against the base configuration and aggregates
ExperimentResult run_all(const ExperimentConfig& base);

} // namespace gasketlab
