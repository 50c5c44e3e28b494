#include "exitwaves/path_simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "exitwaves/equilibrium_engine.hpp"
#include "exitwaves/errors.hpp"
#include "exitwaves/parallel.hpp"
#include "exitwaves/planner_engine.hpp"
#include "exitwaves/welfare_eval.hpp"

namespace exitwaves {

namespace {

// exp(-40) is far below anything a path count can resolve.
constexpr double kNegligibleExponent = 40.0;

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::mt19937_64 path_rng(std::uint64_t seed, std::size_t path) {
  std::uint64_t state = seed;
  const std::uint64_t a = splitmix64(state);
  state = a ^ (static_cast<std::uint64_t>(path) * 0xD1B54A32D192ED03ULL);
  std::seed_seq seq{splitmix64(state), splitmix64(state), splitmix64(state), splitmix64(state)};
  return std::mt19937_64(seq);
}

// Uniform on the open interval (0, 1).
double uniform_open(std::mt19937_64& rng) { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53; }

// Maximum of a Brownian bridge from x0 to x1 with variance `var` over the step.
double bridge_max(double x0, double x1, double var, std::mt19937_64& rng) {
  const double diff = x1 - x0;
  return 0.5 * (x0 + x1 + std::sqrt(diff * diff - 2.0 * var * std::log(uniform_open(rng))));
}

struct CompiledPhase {
  double sd = 0.0;   // S·√dt
  double var = 0.0;  // S²·dt
  double stop_gap = 0.0;
  std::vector<AgentId> active;
  std::vector<double> rates;
  std::vector<AgentId> exiting;
  double reward = 1.0;
  double gate = std::numeric_limits<double>::infinity();
};

struct PathRecord {
  std::vector<double> tau;
  std::vector<double> max;
  std::vector<double> payoff;
  bool censored = false;
  int gate = -1;  // -1 no gate, 0 joint exit, 1 continued
  std::size_t violations = 0;
};

void run_path(const std::vector<CompiledPhase>& phases, std::size_t team_size, const SimConfig& config, double t_max,
              std::size_t path, PathRecord& rec) {
  std::mt19937_64 rng = path_rng(config.seed, path);
  std::normal_distribution<double> normal;
  const std::size_t waves = phases.size();
  rec.tau.assign(waves, 0.0);
  rec.max.assign(waves, 0.0);
  std::vector<double> accrued(team_size, 0.0);
  std::vector<double> reward(team_size, 0.0);
  double x = 0.0;
  double m = 0.0;
  double t = 0.0;
  double phase_start = 0.0;
  std::size_t k = 0;

  auto close_phase = [&](const CompiledPhase& ph) {
    for (std::size_t j = 0; j < ph.active.size(); ++j) accrued[ph.active[j]] += ph.rates[j] * (t - phase_start);
  };
  auto release_all = [&](const CompiledPhase& ph) {
    for (AgentId a : ph.active) reward[a] = m;
    for (std::size_t j = k; j < waves; ++j) {
      rec.tau[j] = t;
      rec.max[j] = m;
    }
  };

  for (;;) {
    const CompiledPhase& ph = phases[k];
    if (t >= t_max) {
      close_phase(ph);
      release_all(ph);
      rec.censored = true;
      break;
    }
    const double x1 = x + ph.sd * normal(rng);
    bool fire = false;
    if (config.bridge_correction) {
      if (x1 > m) {
        m = bridge_max(x, x1, ph.var, rng);
      } else if (2.0 * (m - x) * (m - x1) / ph.var < kNegligibleExponent) {
        m = std::max(m, bridge_max(x, x1, ph.var, rng));
      }
      const double level = m - ph.stop_gap;
      if (x1 <= level) {
        fire = true;
      } else {
        const double e = 2.0 * (x - level) * (x1 - level) / ph.var;
        fire = e < kNegligibleExponent && uniform_open(rng) < std::exp(-e);
      }
      x = fire ? level : x1;
    } else {
      x = x1;
      m = std::max(m, x);
      fire = m - x >= ph.stop_gap;
    }
    if (m < x) ++rec.violations;
    t += config.dt;
    if (!fire) continue;

    close_phase(ph);
    rec.tau[k] = t;
    rec.max[k] = m;
    if (std::isfinite(ph.gate)) rec.gate = m >= ph.gate ? 0 : 1;
    if (m >= ph.gate) {
      release_all(ph);
      break;
    }
    for (AgentId a : ph.exiting) reward[a] = ph.reward * m;
    if (k + 1 == waves) break;
    ++k;
    phase_start = t;
  }
  rec.payoff.resize(team_size);
  for (std::size_t i = 0; i < team_size; ++i) rec.payoff[i] = reward[i] - accrued[i];
}

std::pair<double, double> mean_and_se(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

SimOutcome simulate_compiled(const std::vector<CompiledPhase>& phases, std::size_t team_size, const SimConfig& config,
                             double t_max, bool keep_payoffs = true) {
  std::vector<PathRecord> records(config.n_paths);
  parallel_for(config.n_paths, config.threads,
               [&](std::size_t p) { run_path(phases, team_size, config, t_max, p, records[p]); });

  SimOutcome out;
  out.n_paths = config.n_paths;
  out.t_max = t_max;
  const std::size_t waves = phases.size();
  out.wave_tau.assign(waves, std::vector<double>(config.n_paths));
  out.wave_max.assign(waves, std::vector<double>(config.n_paths));
  std::vector<std::vector<double>> by_agent(team_size, std::vector<double>(config.n_paths));
  std::vector<double> totals(config.n_paths, 0.0);
  for (std::size_t p = 0; p < config.n_paths; ++p) {
    const PathRecord& r = records[p];
    for (std::size_t k = 0; k < waves; ++k) {
      out.wave_tau[k][p] = r.tau[k];
      out.wave_max[k][p] = r.max[k];
    }
    for (std::size_t i = 0; i < team_size; ++i) {
      by_agent[i][p] = r.payoff[i];
      totals[p] += r.payoff[i];
    }
    out.censored += r.censored ? 1 : 0;
    out.continued += r.gate == 1 ? 1 : 0;
    out.max_violations += r.violations;
  }
  for (std::size_t i = 0; i < team_size; ++i) {
    const auto [mean, se] = mean_and_se(by_agent[i]);
    out.mean_payoff.push_back(mean);
    out.se_payoff.push_back(se);
  }
  std::tie(out.mean_total, out.se_total) = mean_and_se(totals);
  for (std::size_t k = 0; k < waves; ++k) {
    WaveStats w;
    std::tie(w.mean_tau, w.se_tau) = mean_and_se(out.wave_tau[k]);
    std::tie(w.mean_max, w.se_max) = mean_and_se(out.wave_max[k]);
    out.waves.push_back(w);
  }
  if (keep_payoffs) {
    out.path_payoffs.resize(config.n_paths);
    for (std::size_t p = 0; p < config.n_paths; ++p) out.path_payoffs[p] = std::move(records[p].payoff);
  }
  if (out.censored * 100 > config.n_paths) {
    std::ostringstream msg;
    msg << out.censored << " of " << config.n_paths << " paths hit the horizon guard t_max = " << t_max;
    if (config.strict) throw SolverError(msg.str());
    out.warnings.push_back(msg.str());
  }
  return out;
}

double resolve_t_max(const SimConfig& config, double expected_duration) {
  if (config.t_max > 0.0) return config.t_max;
  return 50.0 * expected_duration;
}

}  // namespace

void check_config(const SimConfig& config) {
  if (!(config.dt > 0.0) || !std::isfinite(config.dt)) throw ValidationError("sim dt must be positive");
  if (config.n_paths < 1) throw ValidationError("sim n_paths must be at least 1");
  if (!(config.t_max >= 0.0) || !std::isfinite(config.t_max)) {
    throw ValidationError("sim t_max must be positive (or 0 for automatic)");
  }
  if (config.threads < 1) throw ValidationError("sim threads must be at least 1");
}

double plan_expected_duration(const PhasePlan& plan) {
  double total = 0.0;
  double previous = 0.0;
  for (const Phase& p : plan.phases) {
    total += phase_stats(previous, p.stop_gap, p.scopes.total).expected_duration;
    previous = p.stop_gap;
  }
  return total;
}

SimOutcome simulate_plan(const PhasePlan& plan, std::span<const CostSpec> costs, const SimConfig& config) {
  check_config(config);
  if (plan.phases.empty()) throw ValidationError("plan has no phases");
  if (plan.team_size != costs.size()) throw ValidationError("plan team size does not match the cost list");
  std::vector<CompiledPhase> phases;
  double previous = 0.0;
  for (std::size_t k = 0; k < plan.phases.size(); ++k) {
    const Phase& p = plan.phases[k];
    if (p.scopes.alliance != p.active) throw ValidationError("phase scopes do not match its alliance");
    if (!std::isfinite(p.stop_gap) || !(p.stop_gap > previous)) {
      std::ostringstream msg;
      msg << "infeasible plan: phase " << (k + 1) << " stops at gap " << p.stop_gap << " after " << previous;
      throw ValidationError(msg.str());
    }
    if (!(p.scopes.total > 0.0)) throw ValidationError("phase total scope must be positive");
    CompiledPhase c;
    c.sd = p.scopes.total * std::sqrt(config.dt);
    c.var = p.scopes.total * p.scopes.total * config.dt;
    c.stop_gap = p.stop_gap;
    c.active = p.active.members();
    for (std::size_t j = 0; j < p.active.size(); ++j) {
      if (p.active[j] >= plan.team_size) throw ValidationError("plan names an agent outside the team");
      c.rates.push_back(eval_cost(costs[p.active[j]], p.scopes.per_agent[j]));
    }
    c.exiting = p.exiting.members();
    c.reward = p.reward_factor;
    c.gate = p.joint_exit_at;
    phases.push_back(std::move(c));
    previous = p.stop_gap;
  }
  return simulate_compiled(phases, plan.team_size, config, resolve_t_max(config, plan_expected_duration(plan)));
}

SimOutcome simulate_schedule(const ExitSchedule& schedule, std::span<const CostSpec> costs, const SimConfig& config) {
  return simulate_plan(to_plan(schedule, costs.size()), costs, config);
}

SimOutcome simulate_schedule(const AllianceChain& chain, std::span<const CostSpec> costs, const SimConfig& config) {
  if (!chain.feasible) throw ValidationError("cannot simulate an infeasible alliance chain " + chain.label());
  return simulate_plan(to_plan(chain, costs.size()), costs, config);
}

RunningMaxEstimate simulate_running_max(double scope, double horizon, const SimConfig& config) {
  check_config(config);
  if (!(scope > 0.0) || !(horizon > 0.0)) throw ValidationError("running max needs positive scope and horizon");
  const auto steps = static_cast<std::size_t>(std::llround(horizon / config.dt));
  const double sd = scope * std::sqrt(config.dt);
  const double var = sd * sd;
  std::vector<double> maxima(config.n_paths);
  parallel_for(config.n_paths, config.threads, [&](std::size_t p) {
    std::mt19937_64 rng = path_rng(config.seed, p);
    std::normal_distribution<double> normal;
    double x = 0.0;
    double m = 0.0;
    for (std::size_t s = 0; s < steps; ++s) {
      const double x1 = x + sd * normal(rng);
      if (config.bridge_correction) {
        if (x1 > m || 2.0 * (m - x) * (m - x1) / var < kNegligibleExponent) {
          m = std::max(m, bridge_max(x, x1, var, rng));
        }
      } else {
        m = std::max(m, x1);
      }
      x = x1;
    }
    maxima[p] = m;
  });
  RunningMaxEstimate est;
  std::tie(est.mean, est.se) = mean_and_se(maxima);
  est.expected = scope * std::sqrt(2.0 * static_cast<double>(steps) * config.dt / std::numbers::pi);
  return est;
}

double kolmogorov_p_value(double statistic, std::size_t n) {
  const double rn = std::sqrt(static_cast<double>(n));
  const double lambda = (rn + 0.12 + 0.11 / rn) * statistic;
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsReport stopped_max_distribution_test(double drawdown, double scope, const SimConfig& config, double null_mean) {
  check_config(config);
  if (!(drawdown > 0.0) || !(scope > 0.0)) throw ValidationError("KS test needs positive drawdown and scope");
  CompiledPhase ph;
  ph.sd = scope * std::sqrt(config.dt);
  ph.var = ph.sd * ph.sd;
  ph.stop_gap = drawdown;
  ph.active = {0};
  ph.rates = {0.0};
  ph.exiting = {0};
  const double expected = drawdown * drawdown / (scope * scope);
  SimOutcome sim = simulate_compiled({ph}, 1, config, resolve_t_max(config, expected), false);

  KsReport report;
  report.null_mean = null_mean > 0.0 ? null_mean : drawdown;
  std::vector<double> xs = std::move(sim.wave_max[0]);
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = 1.0 - std::exp(-xs[i] / report.null_mean);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  report.statistic = d;
  report.samples = xs.size();
  report.p_value = kolmogorov_p_value(d, xs.size());
  report.passed = report.p_value >= kKsSignificance;
  return report;
}

PlanComparison simulate_equilibrium_vs_planner(std::span<const CostSpec> costs, const ScopeBounds& bounds,
                                               const SimConfig& config) {
  const Alliance team = Alliance::full_team(costs.size());
  PlanComparison cmp;
  cmp.equilibrium = equilibrium_exit_schedule(team, costs, bounds);
  const bool suffix_only = team_well_ordered(team, costs);
  const std::size_t cap = suffix_only ? kSuffixChainCap : kGeneralChainCap;
  if (team.size() <= cap) {
    cmp.planner = brute_force_optimal_sequence(team, costs, bounds).chain;
  } else if (suffix_only) {
    cmp.planner = greedy_wellordered_sequence(team, costs, bounds).chain;
  } else {
    throw ValidationError("planner chain search is limited to teams of at most 6 agents unless costs are well-ordered");
  }
  cmp.equilibrium_welfare = equilibrium_payoffs(cmp.equilibrium, costs);
  cmp.planner_welfare = chain_welfare(cmp.planner, costs);
  cmp.equilibrium_sim = simulate_schedule(cmp.equilibrium, costs, config);
  cmp.planner_sim = simulate_schedule(cmp.planner, costs, config);

  const std::size_t n = config.n_paths;
  std::vector<double> totals(n, 0.0);
  for (std::size_t i = 0; i < costs.size(); ++i) {
    std::vector<double> diff(n);
    for (std::size_t p = 0; p < n; ++p) {
      diff[p] = cmp.planner_sim.path_payoffs[p][i] - cmp.equilibrium_sim.path_payoffs[p][i];
      totals[p] += diff[p];
    }
    const auto [mean, se] = mean_and_se(diff);
    cmp.gap_mean.push_back(mean);
    cmp.gap_se.push_back(se);
  }
  std::tie(cmp.total_gap_mean, cmp.total_gap_se) = mean_and_se(totals);
  return cmp;
}

void write_samples_csv(const SimOutcome& outcome, std::ostream& out) {
  const std::size_t agents = outcome.mean_payoff.size();
  out << "path_id,wave,tau,M_tau";
  for (std::size_t i = 0; i < agents; ++i) out << ",payoff_" << (i + 1);
  out << '\n';
  const auto old_precision = out.precision(10);
  for (std::size_t p = 0; p < outcome.n_paths; ++p) {
    for (std::size_t k = 0; k < outcome.wave_tau.size(); ++k) {
      out << p << ',' << (k + 1) << ',' << outcome.wave_tau[k][p] << ',' << outcome.wave_max[k][p];
      for (std::size_t i = 0; i < agents; ++i) {
        out << ',';
        if (p < outcome.path_payoffs.size()) out << outcome.path_payoffs[p][i];
      }
      out << '\n';
    }
  }
  out.precision(old_precision);
}

}  // namespace exitwaves
