#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "edgesim/harness.hpp"

namespace edgesim {

// Grid topology settings as they appear in the config document; a file path
// may replace them to load an explicit topology.
struct TopologySection {
  std::optional<std::string> file;
  int grid_rows = 5;
  int grid_cols = 5;
  double coverage_radius = 1.0;
  double service_rate = 3.0;
  double power_cap = 140.0;
};

struct ExperimentConfig {
  TopologySection topology;
  RadioParams radio;
  ComputeParams compute;
  ControllerConfig controller;
  RejoConfig rejo;
  double traffic_mean = 6.0;
  double traffic_std = 1.5;
  std::vector<double> traffic_mean_per_region;  // optional override
  std::vector<double> traffic_std_per_region;
  CongestionModel congestion;
  PolicyKind policy = PolicyKind::Engine;
  int slots = 200;
  std::uint64_t seed = 1;
  std::optional<double> pinned_queue;
};

// Parses a JSON document, filling omitted fields with defaults. Unknown keys
// and invariant violations raise ConfigError naming the offending field.
ExperimentConfig parse_config(const std::string& text);

ExperimentConfig default_config();

// Fully resolved document; parse(emit(c)) == c.
std::string emit_config(const ExperimentConfig& config);

// Materializes the topology, models and policy settings for the harness.
RunSpec make_run_spec(const ExperimentConfig& config);

}  // namespace edgesim
