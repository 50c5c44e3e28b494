#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "exitwaves/alliance.hpp"
#include "exitwaves/cost_models.hpp"
#include "exitwaves/schedule_types.hpp"
#include "exitwaves/scope_solver.hpp"

namespace exitwaves {

inline constexpr double kArgmaxTolerance = 1e-12;
inline constexpr std::size_t kSuffixChainCap = 10;
inline constexpr std::size_t kGeneralChainCap = 6;

/// Caches planner scope profiles by alliance mask.
class PlannerProfileCache {
 public:
  PlannerProfileCache(std::span<const CostSpec> costs, const ScopeBounds& bounds);

  const ScopeProfile& profile(const Alliance& alliance);
  /// Σc/S² of the alliance; zero for the empty alliance.
  double cost_per_speed(const Alliance& alliance);

 private:
  std::span<const CostSpec> costs_;
  ScopeBounds bounds_;
  std::map<std::uint64_t, ScopeProfile> profiles_;
};

/// Optimal drawdown at which `current` hands over to `successor`:
/// |current∖successor| / (2(C/S² of current − C/S² of successor)).
/// Non-positive or infinite values are returned as they are.
double planner_drawdown(const Alliance& current, const Alliance& successor, std::span<const CostSpec> costs,
                        const ScopeBounds& bounds);
double planner_drawdown(const Alliance& current, const Alliance& successor, PlannerProfileCache& cache);

/// Attaches planner scopes and drawdowns to a nested alliance list.
AllianceChain build_chain(const std::vector<Alliance>& alliances, PlannerProfileCache& cache);
AllianceChain build_chain(const std::vector<Alliance>& alliances, std::span<const CostSpec> costs,
                          const ScopeBounds& bounds);

struct GreedyResult {
  AllianceChain chain;
  /// Positions in the team (0-based) of the chosen suffix starts, in the
  /// order they were picked: L₁, L₂, …, ending with 0.
  std::vector<std::size_t> picks;
};

/// Greedy sequence for proportional, well-ordered costs. Suffixes are taken over
/// the team's members in increasing id order, which must be increasing multiplier
/// order.
GreedyResult greedy_wellordered_sequence(const Alliance& team, std::span<const CostSpec> costs,
                                         const ScopeBounds& bounds);

/// All nested alliance lists starting at `team`. With `suffix_only` the lists
/// are built from suffixes of the member order; otherwise every strictly nested
/// chain is produced. Chain 0 is always the single alliance.
std::vector<std::vector<Alliance>> enumerate_chains(const Alliance& team, bool suffix_only, std::size_t cap = 0);

enum class ChainSearch { automatic, suffix, general };

struct BruteForceResult {
  AllianceChain chain;
  WelfareReport welfare;
  std::size_t chains_total = 0;
  std::size_t chains_feasible = 0;
};

/// Welfare-maximal feasible chain. `automatic` uses suffix chains when the
/// costs are proportional and well-ordered over the team, all chains otherwise.
/// Ties keep the earliest chain in enumeration order.
BruteForceResult brute_force_optimal_sequence(const Alliance& team, std::span<const CostSpec> costs,
                                              const ScopeBounds& bounds,
                                              ChainSearch search = ChainSearch::automatic);

/// True when the team's costs are proportional with strictly increasing
/// multipliers along the member order.
bool team_well_ordered(const Alliance& team, std::span<const CostSpec> costs);

}  // namespace exitwaves
