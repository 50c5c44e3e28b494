#pragma once

#include <array>

#include "exitwaves/cost_models.hpp"
#include "exitwaves/path_simulator.hpp"
#include "exitwaves/schedule_types.hpp"

namespace exitwaves {

/// Two-agent search in which whoever stops second is paid alpha times the
/// running max. Agent ids are 0 and 1 in `costs` order.
struct PenaltyConfig {
  double alpha = 1.0;
  std::array<CostSpec, 2> costs;
  ScopeBounds bounds;
};

enum class PenaltyRegime { joint_exit, conditional_continuation };

struct PenaltyPolicy {
  double alpha = 1.0;
  AgentId leader = 0;
  AgentId follower = 1;
  /// Full-team scopes and the leader's drawdown; identical to the unpenalised game.
  ScopeProfile team_scopes;
  double team_total = 0.0;
  double leader_scope = 0.0;
  double follower_team_scope = 0.0;
  double leader_drawdown = 0.0;
  /// Follower searching alone.
  ScopeProfile solo_scopes;
  double follower_solo_scope = 0.0;
  double continuation_drawdown = 0.0;
  /// The follower goes on alone only while M is strictly below this level.
  double threshold = 0.0;
  PenaltyRegime regime = PenaltyRegime::joint_exit;
  /// Both full-team drawdowns agree within the tie tolerance.
  bool tied = false;
};

PenaltyPolicy penalty_policy(const PenaltyConfig& config);

/// Deterministic phase plan of the policy (two phases with a joint-exit gate in
/// the continuation regime, one joint phase otherwise).
PhasePlan penalty_plan(const PenaltyPolicy& policy);

struct PenaltyPayoffs {
  double leader = 0.0;
  double follower = 0.0;
  double continuation_probability = 0.0;
};

/// Expected payoffs using the exponential law of M at the leader's stopping time.
PenaltyPayoffs penalty_expected_payoffs(const PenaltyPolicy& policy, const PenaltyConfig& config);

/// Follower's gain from continuing alone rather than stopping, given M at the
/// leader's exit. Zero at the threshold.
double follower_continuation_gain(const PenaltyPolicy& policy, const PenaltyConfig& config, double running_max);

SimOutcome simulate_penalty(const PenaltyPolicy& policy, const PenaltyConfig& config, const SimConfig& sim);

}  // namespace exitwaves
