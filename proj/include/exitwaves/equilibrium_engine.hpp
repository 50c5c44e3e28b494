#pragma once

#include <span>
#include <vector>

#include "exitwaves/alliance.hpp"
#include "exitwaves/cost_models.hpp"
#include "exitwaves/schedule_types.hpp"
#include "exitwaves/scope_solver.hpp"

namespace exitwaves {

/// Equilibrium drawdown sizes d_i = S²/(2c_i(σ_i)) of one alliance.
struct DrawdownSet {
  Alliance alliance;
  std::vector<double> per_agent;  // aligned with alliance.members()
  double trigger = 0.0;           // min drawdown
  Alliance first_exiters;         // agents at the trigger (ties within 1e-12)

  [[nodiscard]] double drawdown_of(AgentId agent) const;
};

inline constexpr double kTieTolerance = 1e-12;

DrawdownSet equilibrium_drawdowns(const Alliance& alliance, const ScopeProfile& scopes,
                                  std::span<const CostSpec> costs);

/// Cascade recursion: the trigger of the current alliance fires a wave, and
/// every agent whose drawdown in the shrunken alliance is at or below that
/// trigger leaves in the same wave.
ExitSchedule equilibrium_exit_schedule(const Alliance& team, std::span<const CostSpec> costs,
                                       const ScopeBounds& bounds);

/// True when no agent with a strictly smaller multiplier (higher cost) exits in
/// a later wave than an agent with a larger multiplier.
bool wellordered_exit_order_check(const ExitSchedule& schedule, std::span<const double> betas);

}  // namespace exitwaves
