#include "exitwaves/equilibrium_engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "exitwaves/errors.hpp"

namespace exitwaves {

double DrawdownSet::drawdown_of(AgentId agent) const {
  const auto& m = alliance.members();
  const auto it = std::lower_bound(m.begin(), m.end(), agent);
  if (it == m.end() || *it != agent) throw ValidationError("agent not in drawdown set");
  return per_agent[static_cast<std::size_t>(it - m.begin())];
}

DrawdownSet equilibrium_drawdowns(const Alliance& alliance, const ScopeProfile& scopes,
                                  std::span<const CostSpec> costs) {
  if (alliance.empty()) throw ValidationError("drawdowns require a non-empty alliance");
  if (scopes.alliance != alliance) {
    throw ValidationError("scope profile belongs to " + scopes.alliance.label() + ", not " + alliance.label());
  }
  DrawdownSet out;
  out.alliance = alliance;
  out.per_agent.resize(alliance.size());
  const double speed = scopes.total * scopes.total;
  for (std::size_t k = 0; k < alliance.size(); ++k) {
    const double d = speed / (2.0 * eval_cost(costs[alliance[k]], scopes.per_agent[k]));
    if (!std::isfinite(d) || !(d > 0.0)) {
      std::ostringstream msg;
      msg << "non-finite drawdown for agent " << (alliance[k] + 1) << " in " << alliance.label();
      throw SolverError(msg.str());
    }
    out.per_agent[k] = d;
  }
  out.trigger = *std::min_element(out.per_agent.begin(), out.per_agent.end());
  std::vector<AgentId> first;
  for (std::size_t k = 0; k < alliance.size(); ++k) {
    if (out.per_agent[k] - out.trigger <= kTieTolerance) first.push_back(alliance[k]);
  }
  out.first_exiters = Alliance(std::move(first));
  return out;
}

namespace {

ScopeProfile solve_named(const Alliance& alliance, std::span<const CostSpec> costs, const ScopeBounds& bounds) {
  try {
    return solve_equilibrium_scopes(alliance, costs, bounds);
  } catch (const SolverError& e) {
    throw SolverError("equilibrium scopes failed for sub-alliance " + alliance.label() + ": " + e.what());
  }
}

}  // namespace

ExitSchedule equilibrium_exit_schedule(const Alliance& team, std::span<const CostSpec> costs,
                                       const ScopeBounds& bounds) {
  if (team.empty()) throw ValidationError("exit schedule requires a non-empty team");
  ExitSchedule schedule;
  Alliance active = team;
  double previous_trigger = 0.0;
  while (!active.empty()) {
    ScopeProfile scopes = solve_named(active, costs, bounds);
    const DrawdownSet drawdowns = equilibrium_drawdowns(active, scopes, costs);
    const double trigger = drawdowns.trigger;
    Alliance exiting = drawdowns.first_exiters;

    // Grow the wave until everyone left behind would keep searching past the trigger.
    for (;;) {
      const Alliance rest = active.without(exiting);
      if (rest.empty()) break;
      const ScopeProfile rest_scopes = solve_named(rest, costs, bounds);
      const DrawdownSet rest_drawdowns = equilibrium_drawdowns(rest, rest_scopes, costs);
      std::vector<AgentId> follow;
      for (std::size_t k = 0; k < rest.size(); ++k) {
        if (rest_drawdowns.per_agent[k] <= trigger + kTieTolerance) follow.push_back(rest[k]);
      }
      if (follow.empty()) break;
      exiting = exiting.united(Alliance(std::move(follow)));
    }

    if (!schedule.waves.empty() && !(trigger > previous_trigger)) {
      std::ostringstream msg;
      msg.precision(12);
      msg << "exit-wave triggers must increase strictly: " << trigger << " after " << previous_trigger;
      throw SolverError(msg.str());
    }
    previous_trigger = trigger;
    Alliance next = active.without(exiting);
    schedule.waves.push_back({std::move(exiting), trigger, active, std::move(scopes)});
    active = std::move(next);
  }
  return schedule;
}

bool wellordered_exit_order_check(const ExitSchedule& schedule, std::span<const double> betas) {
  for (std::size_t i = 0; i < betas.size(); ++i) {
    for (std::size_t j = 0; j < betas.size(); ++j) {
      if (betas[i] < betas[j] && schedule.wave_of(i) > schedule.wave_of(j)) return false;
    }
  }
  return true;
}

}  // namespace exitwaves
