#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "exitwaves/cost_models.hpp"
#include "exitwaves/path_simulator.hpp"

namespace exitwaves {

struct ScanSpec {
  std::array<double, 2> beta2_range{0.0, 24.0};
  std::array<double, 2> beta3_range{0.0, 24.0};
  std::size_t steps = 96;
};

struct ScenarioConfig {
  std::vector<CostSpec> agents;
  ScopeBounds scope_bounds;
  std::optional<SimConfig> sim;
  std::optional<double> penalty_alpha;
  std::optional<ScanSpec> scan;
};

/// Parses a scenario document. Unknown keys, missing required keys, wrong
/// types and invalid cost specs raise ValidationError.
ScenarioConfig parse_scenario(const nlohmann::json& doc);
ScenarioConfig load_scenario(const std::string& path);

/// Normalized document with every default filled in.
nlohmann::json scenario_to_json(const ScenarioConfig& config);
nlohmann::json cost_to_json(const CostSpec& cost);

}  // namespace exitwaves
