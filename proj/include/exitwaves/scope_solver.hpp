#pragma once

#include <span>
#include <string>
#include <vector>

#include "exitwaves/alliance.hpp"
#include "exitwaves/cost_models.hpp"

namespace exitwaves {

/// Constant per-agent search scopes of one active alliance.
struct ScopeProfile {
  Alliance alliance;
  std::vector<double> per_agent;  // aligned with alliance.members()
  double total = 0.0;
  /// Every agent satisfies its first-order condition with equality.
  bool interior = false;
  /// The split among constant-ratio agents was fixed by the equal-treatment rule.
  bool degenerate = false;
  /// Other consistent totals found on the scan grid (multiple equilibria).
  std::vector<double> alternative_totals;
  std::vector<std::string> warnings;

  [[nodiscard]] double scope_of(AgentId agent) const;
};

inline constexpr double kRootTolerance = 1e-12;
inline constexpr int kMaxBisectionIterations = 200;
inline constexpr int kScanGridPoints = 512;

/// Equilibrium scopes: every interior agent satisfies 2c_i(σ_i)/c_i'(σ_i) = Σσ_j;
/// clipped agents satisfy the corner inequalities (ratio ≥ S at hi, ratio ≤ S at lo).
/// `costs` is indexed by agent id over the full team.
ScopeProfile solve_equilibrium_scopes(const Alliance& alliance, std::span<const CostSpec> costs,
                                      const ScopeBounds& bounds);

/// Planner scopes: interior agents share the marginal cost λ with 2Σc_i = λ·Σσ_i.
ScopeProfile solve_planner_scopes(const Alliance& alliance, std::span<const CostSpec> costs,
                                  const ScopeBounds& bounds);

/// Largest team size N for which N copies of `cost` admit an interior
/// equilibrium (0 when even a single agent is clipped). Searches up to `max_team`.
std::size_t interior_capacity(const CostSpec& cost, const ScopeBounds& bounds, std::size_t max_team = 100000);

/// Sum of member costs at the profile's scopes.
double total_cost_rate(const ScopeProfile& profile, std::span<const CostSpec> costs);

/// Σc_i / S², the alliance's cost per unit of squared scope.
double cost_per_speed(const ScopeProfile& profile, std::span<const CostSpec> costs);

}  // namespace exitwaves
