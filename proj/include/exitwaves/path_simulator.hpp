#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "exitwaves/cost_models.hpp"
#include "exitwaves/schedule_types.hpp"

namespace exitwaves {

struct SimConfig {
  double dt = 1e-4;
  std::size_t n_paths = 20000;
  std::uint64_t seed = 20240607;
  /// Horizon guard; 0 picks 50 times the plan's expected duration.
  double t_max = 0.0;
  /// Sample the within-step maximum and the within-step crossing of the
  /// stopping level from the Brownian bridge.
  bool bridge_correction = true;
  std::size_t threads = 1;
  /// Escalate more than 1% censored paths from a warning to an error.
  bool strict = false;
};

void check_config(const SimConfig& config);

struct WaveStats {
  double mean_tau = 0.0;
  double se_tau = 0.0;
  double mean_max = 0.0;
  double se_max = 0.0;
};

struct SimOutcome {
  std::size_t n_paths = 0;
  std::vector<double> mean_payoff;  // indexed by agent id over the team
  std::vector<double> se_payoff;
  double mean_total = 0.0;
  double se_total = 0.0;
  std::vector<WaveStats> waves;
  /// wave_tau[k][p], wave_max[k][p]: exit time and running max when phase k ended on path p.
  std::vector<std::vector<double>> wave_tau;
  std::vector<std::vector<double>> wave_max;
  /// path_payoffs[p][i]
  std::vector<std::vector<double>> path_payoffs;
  std::size_t censored = 0;
  /// Paths on which a finite joint-exit gate was checked and the search went on.
  std::size_t continued = 0;
  /// Steps at which the running max fell below the current value (should stay 0).
  std::size_t max_violations = 0;
  double t_max = 0.0;
  std::vector<std::string> warnings;
};

/// Analytic expected duration of a plan ignoring any joint-exit gates.
double plan_expected_duration(const PhasePlan& plan);

SimOutcome simulate_plan(const PhasePlan& plan, std::span<const CostSpec> costs, const SimConfig& config);
SimOutcome simulate_schedule(const ExitSchedule& schedule, std::span<const CostSpec> costs, const SimConfig& config);
SimOutcome simulate_schedule(const AllianceChain& chain, std::span<const CostSpec> costs, const SimConfig& config);

struct RunningMaxEstimate {
  double mean = 0.0;
  double se = 0.0;
  double expected = 0.0;  // scope·√(2t/π)
};

/// Running maximum at a fixed horizon for a search at constant total scope.
RunningMaxEstimate simulate_running_max(double scope, double horizon, const SimConfig& config);

struct KsReport {
  double statistic = 0.0;
  double p_value = 0.0;
  double null_mean = 0.0;
  std::size_t samples = 0;
  bool passed = false;
};

inline constexpr double kKsSignificance = 0.01;

/// Asymptotic Kolmogorov tail probability for statistic D from n samples.
double kolmogorov_p_value(double statistic, std::size_t n);

/// KS test of the running max at the drawdown stopping time against the
/// exponential law with mean `null_mean` (defaults to the drawdown).
KsReport stopped_max_distribution_test(double drawdown, double scope, const SimConfig& config,
                                       double null_mean = 0.0);

struct PlanComparison {
  ExitSchedule equilibrium;
  AllianceChain planner;
  SimOutcome equilibrium_sim;
  SimOutcome planner_sim;
  WelfareReport equilibrium_welfare;
  WelfareReport planner_welfare;
  std::vector<double> gap_mean;  // planner minus equilibrium, per agent
  std::vector<double> gap_se;
  double total_gap_mean = 0.0;
  double total_gap_se = 0.0;
};

/// Runs the equilibrium schedule and the planner's optimal chain on common
/// random numbers.
PlanComparison simulate_equilibrium_vs_planner(std::span<const CostSpec> costs, const ScopeBounds& bounds,
                                               const SimConfig& config);

/// Delimited rows: path_id, wave, tau, M_tau, payoff_1 … payoff_N.
void write_samples_csv(const SimOutcome& outcome, std::ostream& out);

}  // namespace exitwaves
