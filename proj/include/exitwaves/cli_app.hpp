#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "exitwaves/scenario.hpp"

namespace exitwaves {

struct ScanCell {
  double beta2 = 0.0;
  double beta3 = 0.0;
  /// Cells outside β₃ > β₂ > β₁ are not evaluated.
  bool valid = false;
  std::string equilibrium;
  std::string planner;
};

/// Exit-wave partitions over the (β₂, β₃) grid at cell centers, in row-major
/// order (β₂ outer, β₃ inner).
std::vector<ScanCell> exit_wave_scan(const ScenarioConfig& config, std::size_t threads = 1);

void write_scan_csv(const std::vector<ScanCell>& cells, std::ostream& out);
/// Colored region map of the equilibrium labels.
void write_scan_svg(const std::vector<ScanCell>& cells, const ScanSpec& spec, std::ostream& out);

/// Entry point of the command-line tool. Returns 0 on success, 1 on a runtime
/// or numerical failure and 2 on a configuration or usage error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace exitwaves
