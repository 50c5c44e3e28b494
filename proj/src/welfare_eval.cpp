#include "exitwaves/welfare_eval.hpp"

#include <cmath>
#include <sstream>

#include "exitwaves/errors.hpp"
#include "exitwaves/scope_solver.hpp"

namespace exitwaves {

PhaseStats phase_stats(double start_gap, double stop_gap, double total_scope) {
  if (!(total_scope > 0.0) || !std::isfinite(total_scope)) throw ValidationError("phase total scope must be positive");
  if (!(start_gap >= 0.0)) throw ValidationError("phase start gap must be non-negative");
  if (!(start_gap < stop_gap) || !std::isfinite(stop_gap)) {
    std::ostringstream msg;
    msg << "phase stop gap " << stop_gap << " must be finite and exceed start gap " << start_gap;
    throw ValidationError(msg.str());
  }
  return {stop_gap - start_gap, (stop_gap * stop_gap - start_gap * start_gap) / (total_scope * total_scope)};
}

WelfareReport chain_welfare(const PhasePlan& plan, std::span<const CostSpec> costs) {
  if (plan.phases.empty()) throw ValidationError("plan has no phases");
  if (plan.team_size != costs.size()) throw ValidationError("plan team size does not match the cost list");
  WelfareReport report;
  report.per_agent.assign(plan.team_size, 0.0);
  std::vector<double> accrued(plan.team_size, 0.0);
  double previous_gap = 0.0;
  double expected_max = 0.0;
  for (std::size_t k = 0; k < plan.phases.size(); ++k) {
    const Phase& p = plan.phases[k];
    if (p.reward_factor != 1.0 || std::isfinite(p.joint_exit_at)) {
      throw ValidationError("closed-form welfare does not cover gated or penalised phases");
    }
    if (p.scopes.alliance != p.active) throw ValidationError("phase scopes do not match its alliance");
    if (k + 1 < plan.phases.size() && p.active.without(p.exiting) != plan.phases[k + 1].active) {
      throw ValidationError("phase alliances are not consistent with the exit blocks");
    }
    if (k + 1 == plan.phases.size() && p.exiting != p.active) {
      throw ValidationError("last phase must release every remaining agent");
    }
    PhaseStats stats;
    try {
      stats = phase_stats(previous_gap, p.stop_gap, p.scopes.total);
    } catch (const ValidationError& e) {
      std::ostringstream msg;
      msg << "infeasible plan at phase " << (k + 1) << " (" << p.active.label() << "): " << e.what();
      throw ValidationError(msg.str());
    }
    PhaseBreakdown breakdown;
    breakdown.expected_max_gain = stats.expected_max_gain;
    breakdown.expected_duration = stats.expected_duration;
    breakdown.cost_by_agent.assign(plan.team_size, 0.0);
    for (std::size_t j = 0; j < p.active.size(); ++j) {
      const AgentId a = p.active[j];
      if (a >= plan.team_size) throw ValidationError("plan names an agent outside the team");
      const double c = eval_cost(costs[a], p.scopes.per_agent[j]) * stats.expected_duration;
      breakdown.cost_by_agent[a] = c;
      accrued[a] += c;
    }
    expected_max += stats.expected_max_gain;
    for (AgentId a : p.exiting) report.per_agent[a] = expected_max - accrued[a];
    report.per_phase.push_back(std::move(breakdown));
    previous_gap = p.stop_gap;
  }
  for (double v : report.per_agent) report.total += v;
  return report;
}

WelfareReport chain_welfare(const AllianceChain& chain, std::span<const CostSpec> costs) {
  return chain_welfare(to_plan(chain, costs.size()), costs);
}

WelfareReport chain_welfare(const ExitSchedule& schedule, std::span<const CostSpec> costs) {
  return chain_welfare(to_plan(schedule, costs.size()), costs);
}

WelfareReport equilibrium_payoffs(const ExitSchedule& schedule, std::span<const CostSpec> costs) {
  return chain_welfare(schedule, costs);
}

double solo_search_payoff(const CostSpec& cost, const ScopeBounds& bounds) {
  const CostSpec single[] = {cost};
  const ScopeProfile p = solve_equilibrium_scopes(Alliance{0}, single, bounds);
  return p.total * p.total / (4.0 * eval_cost(cost, p.total));
}

}  // namespace exitwaves
