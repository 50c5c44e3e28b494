#pragma once

#include <limits>
#include <string>
#include <vector>

#include "exitwaves/alliance.hpp"
#include "exitwaves/scope_solver.hpp"

namespace exitwaves {

struct ExitWave {
  Alliance exiting;
  double trigger = 0.0;
  Alliance active;  // alliance searching up to this wave
  ScopeProfile scopes;
};

/// Equilibrium outcome: ordered partition of the team into exit waves with
/// strictly increasing trigger drawdowns.
struct ExitSchedule {
  std::vector<ExitWave> waves;

  [[nodiscard]] std::size_t size() const noexcept { return waves.size(); }
  /// Index of the wave in which `agent` exits.
  [[nodiscard]] std::size_t wave_of(AgentId agent) const;
  [[nodiscard]] std::vector<Alliance> partition() const;
  /// e.g. "{1,2}{3}"
  [[nodiscard]] std::string label(const std::string& separator = "") const;
};

/// Planner outcome: strictly nested alliances A_1 ⊋ A_2 ⊋ … ⊋ A_K with the
/// drawdown at which each one hands over to the next.
struct AllianceChain {
  std::vector<Alliance> alliances;
  std::vector<double> drawdowns;
  std::vector<ScopeProfile> scopes;
  bool feasible = false;

  [[nodiscard]] std::size_t size() const noexcept { return alliances.size(); }
  /// Exit blocks A_k \ A_{k+1}.
  [[nodiscard]] std::vector<Alliance> partition() const;
  [[nodiscard]] std::string label(const std::string& separator = "") const;
};

/// One phase of a deterministic search plan: `active` searches with `scopes`
/// until the drawdown reaches `stop_gap`, then `exiting` leaves and is paid
/// reward_factor·M. If M at that moment is at or above `joint_exit_at`, every
/// remaining agent leaves as well and is paid M.
struct Phase {
  Alliance active;
  ScopeProfile scopes;
  double stop_gap = 0.0;
  Alliance exiting;
  double reward_factor = 1.0;
  double joint_exit_at = std::numeric_limits<double>::infinity();
};

struct PhasePlan {
  std::size_t team_size = 0;
  std::vector<Phase> phases;
};

PhasePlan to_plan(const ExitSchedule& schedule, std::size_t team_size);
PhasePlan to_plan(const AllianceChain& chain, std::size_t team_size);

struct PhaseBreakdown {
  double expected_max_gain = 0.0;
  double expected_duration = 0.0;
  std::vector<double> cost_by_agent;  // indexed by agent id over the team
};

/// Expected payoffs from the start state (M, X) = (0, 0).
struct WelfareReport {
  std::vector<double> per_agent;  // indexed by agent id over the team
  double total = 0.0;
  std::vector<PhaseBreakdown> per_phase;
};

}  // namespace exitwaves
