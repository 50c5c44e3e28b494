#pragma once

#include <span>

#include "exitwaves/cost_models.hpp"
#include "exitwaves/schedule_types.hpp"

namespace exitwaves {

struct PhaseStats {
  double expected_max_gain = 0.0;
  double expected_duration = 0.0;
};

/// Expected running-max gain and expected duration of a driftless search at
/// total scope `total_scope` that starts with gap `start_gap` below the running
/// max and stops when the gap first reaches `stop_gap`.
PhaseStats phase_stats(double start_gap, double stop_gap, double total_scope);

/// Expected payoff of every agent under a deterministic plan. Agents leaving in
/// phase k receive E[M] at that phase minus their accrued search costs.
/// Plans with early-exit gates or partial rewards are rejected (those are
/// handled by the penalty module).
WelfareReport chain_welfare(const PhasePlan& plan, std::span<const CostSpec> costs);
WelfareReport chain_welfare(const AllianceChain& chain, std::span<const CostSpec> costs);
WelfareReport chain_welfare(const ExitSchedule& schedule, std::span<const CostSpec> costs);

WelfareReport equilibrium_payoffs(const ExitSchedule& schedule, std::span<const CostSpec> costs);

/// Payoff of an agent searching alone at its optimal scope, σ²/(4c(σ)).
double solo_search_payoff(const CostSpec& cost, const ScopeBounds& bounds);

}  // namespace exitwaves
