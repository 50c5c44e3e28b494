#include "exitwaves/penalty_ext.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "exitwaves/equilibrium_engine.hpp"
#include "exitwaves/errors.hpp"
#include "exitwaves/scope_solver.hpp"

namespace exitwaves {

PenaltyPolicy penalty_policy(const PenaltyConfig& config) {
  if (!(config.alpha >= 0.0 && config.alpha <= 1.0)) {
    std::ostringstream msg;
    msg << "penalty alpha must lie in [0, 1], got " << config.alpha;
    throw ValidationError(msg.str());
  }
  check_bounds(config.bounds);
  require_valid(config.costs, config.bounds);

  PenaltyPolicy policy;
  policy.alpha = config.alpha;
  const Alliance team{0, 1};
  policy.team_scopes = solve_equilibrium_scopes(team, config.costs, config.bounds);
  const DrawdownSet drawdowns = equilibrium_drawdowns(team, policy.team_scopes, config.costs);
  policy.tied = drawdowns.first_exiters.size() == 2;
  policy.leader = drawdowns.first_exiters[0];
  policy.follower = 1 - policy.leader;
  policy.team_total = policy.team_scopes.total;
  policy.leader_scope = policy.team_scopes.scope_of(policy.leader);
  policy.follower_team_scope = policy.team_scopes.scope_of(policy.follower);
  policy.leader_drawdown = drawdowns.trigger;

  const CostSpec& follower_cost = config.costs[policy.follower];
  policy.solo_scopes = solve_equilibrium_scopes(Alliance{policy.follower}, config.costs, config.bounds);
  policy.follower_solo_scope = policy.solo_scopes.total;
  const double sigma = policy.follower_solo_scope;
  const double c = eval_cost(follower_cost, sigma);
  policy.continuation_drawdown = config.alpha * sigma * sigma / (2.0 * c);

  if (!policy.tied && policy.continuation_drawdown > policy.leader_drawdown) {
    policy.regime = PenaltyRegime::conditional_continuation;
    if (config.alpha == 1.0) {
      policy.threshold = std::numeric_limits<double>::infinity();
    } else {
      const double excess = policy.continuation_drawdown - policy.leader_drawdown;
      policy.threshold = (c / (sigma * sigma)) * excess * excess / (1.0 - config.alpha);
    }
  } else {
    policy.regime = PenaltyRegime::joint_exit;
    policy.threshold = 0.0;
  }
  return policy;
}

PhasePlan penalty_plan(const PenaltyPolicy& policy) {
  PhasePlan plan;
  plan.team_size = 2;
  Phase first;
  first.active = Alliance{0, 1};
  first.scopes = policy.team_scopes;
  first.stop_gap = policy.leader_drawdown;
  if (policy.regime == PenaltyRegime::joint_exit) {
    first.exiting = first.active;
    plan.phases.push_back(std::move(first));
    return plan;
  }
  first.exiting = Alliance{policy.leader};
  first.joint_exit_at = policy.threshold;
  Phase second;
  second.active = Alliance{policy.follower};
  second.scopes = policy.solo_scopes;
  second.stop_gap = policy.continuation_drawdown;
  second.exiting = second.active;
  second.reward_factor = policy.alpha;
  plan.phases.push_back(std::move(first));
  plan.phases.push_back(std::move(second));
  return plan;
}

double follower_continuation_gain(const PenaltyPolicy& policy, const PenaltyConfig& config, double running_max) {
  const double sigma = policy.follower_solo_scope;
  const double k = eval_cost(config.costs[policy.follower], sigma) / (sigma * sigma);
  const double excess = policy.continuation_drawdown - policy.leader_drawdown;
  return -(1.0 - policy.alpha) * running_max + k * excess * excess;
}

PenaltyPayoffs penalty_expected_payoffs(const PenaltyPolicy& policy, const PenaltyConfig& config) {
  const double d = policy.leader_drawdown;
  const double s2 = policy.team_total * policy.team_total;
  const double duration = d * d / s2;
  PenaltyPayoffs out;
  out.leader = d - eval_cost(config.costs[policy.leader], policy.leader_scope) * duration;
  out.follower = d - eval_cost(config.costs[policy.follower], policy.follower_team_scope) * duration;
  if (policy.regime == PenaltyRegime::joint_exit) return out;

  const double sigma = policy.follower_solo_scope;
  const double k = eval_cost(config.costs[policy.follower], sigma) / (sigma * sigma);
  const double excess = policy.continuation_drawdown - policy.leader_drawdown;
  double p = 1.0;
  double partial_mean = d;  // E[M; M < threshold]
  if (std::isfinite(policy.threshold)) {
    const double tail = std::exp(-policy.threshold / d);
    p = 1.0 - tail;
    partial_mean = d - (policy.threshold + d) * tail;
  }
  out.continuation_probability = p;
  out.follower += -(1.0 - policy.alpha) * partial_mean + k * excess * excess * p;
  return out;
}

SimOutcome simulate_penalty(const PenaltyPolicy& policy, const PenaltyConfig& config, const SimConfig& sim) {
  return simulate_plan(penalty_plan(policy), config.costs, sim);
}

}  // namespace exitwaves
