#include "exitwaves/cli_app.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "exitwaves/equilibrium_engine.hpp"
#include "exitwaves/errors.hpp"
#include "exitwaves/parallel.hpp"
#include "exitwaves/path_simulator.hpp"
#include "exitwaves/penalty_ext.hpp"
#include "exitwaves/planner_engine.hpp"
#include "exitwaves/welfare_eval.hpp"

namespace exitwaves {

namespace {

std::string num(double v) {
  std::ostringstream s;
  s.precision(10);
  s << v;
  return s.str();
}

std::string cell(const std::string& text) {
  if (text.find_first_of(",\"") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

struct PlannerSolution {
  AllianceChain chain;
  std::vector<std::size_t> picks;
  bool greedy = false;
};

PlannerSolution solve_planner(const Alliance& team, std::span<const CostSpec> costs, const ScopeBounds& bounds) {
  PlannerSolution out;
  if (team_well_ordered(team, costs)) {
    GreedyResult g = greedy_wellordered_sequence(team, costs, bounds);
    out.chain = std::move(g.chain);
    out.picks = std::move(g.picks);
    out.greedy = true;
    return out;
  }
  if (team.size() > kGeneralChainCap) {
    throw ValidationError("planner chain search needs well-ordered costs for teams above 6 agents");
  }
  out.chain = brute_force_optimal_sequence(team, costs, bounds, ChainSearch::general).chain;
  return out;
}

void write_welfare(const WelfareReport& w, std::ostream& out) {
  out << "agent,payoff\n";
  for (std::size_t i = 0; i < w.per_agent.size(); ++i) out << (i + 1) << ',' << num(w.per_agent[i]) << '\n';
  out << "total," << num(w.total) << '\n';
}

void cmd_solve(const ScenarioConfig& config, const std::string& mode, std::ostream& out) {
  const Alliance team = Alliance::full_team(config.agents.size());
  out << "agent,sigma,cost_rate,drawdown\n";
  if (mode == "eq") {
    const ScopeProfile p = solve_equilibrium_scopes(team, config.agents, config.scope_bounds);
    const DrawdownSet d = equilibrium_drawdowns(team, p, config.agents);
    for (std::size_t k = 0; k < team.size(); ++k) {
      out << (team[k] + 1) << ',' << num(p.per_agent[k]) << ',' << num(eval_cost(config.agents[team[k]], p.per_agent[k]))
          << ',' << num(d.per_agent[k]) << '\n';
    }
    out << "total," << num(p.total) << ',' << num(total_cost_rate(p, config.agents)) << ',' << num(d.trigger) << '\n';
  } else {
    const ScopeProfile p = solve_planner_scopes(team, config.agents, config.scope_bounds);
    const double d = planner_drawdown(team, Alliance{}, config.agents, config.scope_bounds);
    for (std::size_t k = 0; k < team.size(); ++k) {
      out << (team[k] + 1) << ',' << num(p.per_agent[k]) << ',' << num(eval_cost(config.agents[team[k]], p.per_agent[k]))
          << ',' << num(d) << '\n';
    }
    out << "total," << num(p.total) << ',' << num(total_cost_rate(p, config.agents)) << ',' << num(d) << '\n';
  }
}

void cmd_schedule(const ScenarioConfig& config, const std::string& mode, std::ostream& out) {
  const Alliance team = Alliance::full_team(config.agents.size());
  out << "wave,exiting,active,total_scope,drawdown\n";
  if (mode == "eq") {
    const ExitSchedule s = equilibrium_exit_schedule(team, config.agents, config.scope_bounds);
    for (std::size_t k = 0; k < s.size(); ++k) {
      const ExitWave& w = s.waves[k];
      out << (k + 1) << ',' << cell(w.exiting.label()) << ',' << cell(w.active.label()) << ','
          << num(w.scopes.total) << ',' << num(w.trigger) << '\n';
    }
    out << "\npartition\n" << cell(s.label(" | ")) << "\n\n";
    write_welfare(equilibrium_payoffs(s, config.agents), out);
    return;
  }
  const PlannerSolution sol = solve_planner(team, config.agents, config.scope_bounds);
  const auto blocks = sol.chain.partition();
  for (std::size_t k = 0; k < sol.chain.size(); ++k) {
    out << (k + 1) << ',' << cell(blocks[k].label()) << ',' << cell(sol.chain.alliances[k].label()) << ','
        << num(sol.chain.scopes[k].total) << ',' << num(sol.chain.drawdowns[k]) << '\n';
  }
  out << "\npartition\n" << cell(sol.chain.label(" | ")) << "\n\n";
  write_welfare(chain_welfare(sol.chain, config.agents), out);
  if (sol.greedy) {
    out << "\nstep,suffix_start\n";
    for (std::size_t k = 0; k < sol.picks.size(); ++k) out << "L" << (k + 1) << ',' << (team[sol.picks[k]] + 1) << '\n';
  }
}

struct Row {
  std::string name;
  double analytic;
  double mean;
  double se;
};

void write_rows(const std::vector<Row>& rows, std::ostream& out) {
  out << "quantity,analytic,mc_mean,mc_se,z,agreement\n";
  for (const Row& r : rows) {
    const double diff = r.mean - r.analytic;
    const double z = r.se > 0.0 ? diff / r.se : (diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff));
    out << r.name << ',' << num(r.analytic) << ',' << num(r.mean) << ',' << num(r.se) << ',' << num(z) << ','
        << (std::abs(z) <= 3.0 ? "PASS" : "FAIL") << '\n';
  }
}

std::vector<Row> plan_rows(const PhasePlan& plan, const WelfareReport& w, const SimOutcome& sim) {
  std::vector<Row> rows;
  for (std::size_t i = 0; i < w.per_agent.size(); ++i) {
    rows.push_back({"payoff_" + std::to_string(i + 1), w.per_agent[i], sim.mean_payoff[i], sim.se_payoff[i]});
  }
  rows.push_back({"payoff_total", w.total, sim.mean_total, sim.se_total});
  double elapsed = 0.0;
  for (std::size_t k = 0; k < plan.phases.size(); ++k) {
    elapsed += w.per_phase[k].expected_duration;
    const std::string tag = std::to_string(k + 1);
    rows.push_back({"tau_wave_" + tag, elapsed, sim.waves[k].mean_tau, sim.waves[k].se_tau});
    rows.push_back({"M_wave_" + tag, plan.phases[k].stop_gap, sim.waves[k].mean_max, sim.waves[k].se_max});
  }
  return rows;
}

void cmd_simulate(const ScenarioConfig& config, const std::string& mode, const SimConfig& sim,
                  const std::string& dump_path, std::ostream& out, std::ostream& err) {
  const Alliance team = Alliance::full_team(config.agents.size());
  SimOutcome outcome;
  std::vector<Row> rows;
  if (mode == "penalty") {
    if (!config.penalty_alpha) throw ValidationError("mode penalty needs a 'penalty' section");
    PenaltyConfig pc;
    pc.alpha = *config.penalty_alpha;
    pc.costs = {config.agents[0], config.agents[1]};
    pc.bounds = config.scope_bounds;
    const PenaltyPolicy policy = penalty_policy(pc);
    const PenaltyPayoffs expected = penalty_expected_payoffs(policy, pc);
    outcome = simulate_penalty(policy, pc, sim);
    const double n = static_cast<double>(outcome.n_paths);
    const double freq = static_cast<double>(outcome.continued) / n;
    const double p = expected.continuation_probability;
    rows.push_back({"payoff_leader", expected.leader, outcome.mean_payoff[policy.leader], outcome.se_payoff[policy.leader]});
    rows.push_back(
        {"payoff_follower", expected.follower, outcome.mean_payoff[policy.follower], outcome.se_payoff[policy.follower]});
    rows.push_back({"continuation_frequency", p, freq, std::sqrt(p * (1.0 - p) / n)});
    const double s = policy.team_total;
    rows.push_back({"tau_wave_1", policy.leader_drawdown * policy.leader_drawdown / (s * s), outcome.waves[0].mean_tau,
                    outcome.waves[0].se_tau});
    rows.push_back({"M_wave_1", policy.leader_drawdown, outcome.waves[0].mean_max, outcome.waves[0].se_max});
    out << "leader,follower,regime,threshold\n"
        << (policy.leader + 1) << ',' << (policy.follower + 1) << ','
        << (policy.regime == PenaltyRegime::joint_exit ? "joint_exit" : "conditional_continuation") << ','
        << num(policy.threshold) << "\n\n";
  } else {
    PhasePlan plan;
    WelfareReport w;
    if (mode == "eq") {
      const ExitSchedule s = equilibrium_exit_schedule(team, config.agents, config.scope_bounds);
      plan = to_plan(s, config.agents.size());
      w = equilibrium_payoffs(s, config.agents);
    } else {
      const PlannerSolution sol = solve_planner(team, config.agents, config.scope_bounds);
      plan = to_plan(sol.chain, config.agents.size());
      w = chain_welfare(sol.chain, config.agents);
    }
    outcome = simulate_plan(plan, config.agents, sim);
    rows = plan_rows(plan, w, outcome);
  }
  write_rows(rows, out);
  out << "\npaths,censored\n" << outcome.n_paths << ',' << outcome.censored << '\n';
  for (const auto& w : outcome.warnings) err << "warning: " << w << '\n';
  if (!dump_path.empty()) {
    std::ofstream f(dump_path);
    if (!f) throw std::runtime_error("cannot write samples to '" + dump_path + "'");
    write_samples_csv(outcome, f);
  }
}

}  // namespace

std::vector<ScanCell> exit_wave_scan(const ScenarioConfig& config, std::size_t threads) {
  if (!config.scan) throw ValidationError("scenario has no 'scan' section");
  const ScanSpec& spec = *config.scan;
  const auto& first = std::get<ScaledExponential>(config.agents.at(0).family);
  const double h2 = (spec.beta2_range[1] - spec.beta2_range[0]) / static_cast<double>(spec.steps);
  const double h3 = (spec.beta3_range[1] - spec.beta3_range[0]) / static_cast<double>(spec.steps);
  std::vector<ScanCell> cells(spec.steps * spec.steps);
  const Alliance team = Alliance::full_team(3);
  parallel_for(cells.size(), threads, [&](std::size_t idx) {
    ScanCell& c = cells[idx];
    c.beta2 = spec.beta2_range[0] + (static_cast<double>(idx / spec.steps) + 0.5) * h2;
    c.beta3 = spec.beta3_range[0] + (static_cast<double>(idx % spec.steps) + 0.5) * h3;
    c.valid = c.beta3 > c.beta2 && c.beta2 > first.beta;
    if (!c.valid) {
      c.equilibrium = c.planner = "n/a";
      return;
    }
    const std::vector<CostSpec> costs{exponential_cost(first.rate, first.beta), exponential_cost(first.rate, c.beta2),
                                      exponential_cost(first.rate, c.beta3)};
    c.equilibrium = equilibrium_exit_schedule(team, costs, config.scope_bounds).label();
    c.planner = greedy_wellordered_sequence(team, costs, config.scope_bounds).chain.label();
  });
  return cells;
}

void write_scan_csv(const std::vector<ScanCell>& cells, std::ostream& out) {
  out << "beta2,beta3,equilibrium,planner\n";
  for (const ScanCell& c : cells) {
    out << num(c.beta2) << ',' << num(c.beta3) << ',' << cell(c.equilibrium) << ',' << cell(c.planner) << '\n';
  }
}

void write_scan_svg(const std::vector<ScanCell>& cells, const ScanSpec& spec, std::ostream& out) {
  static const std::map<std::string, std::string> colors{{"{1,2,3}", "#4c72b0"},
                                                         {"{1}{2,3}", "#dd8452"},
                                                         {"{1,2}{3}", "#55a868"},
                                                         {"{1}{2}{3}", "#c44e52"}};
  constexpr int px = 6;
  const int size = static_cast<int>(spec.steps) * px;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size + 160 << "\" height=\"" << size << "\">\n";
  for (std::size_t idx = 0; idx < cells.size(); ++idx) {
    const auto i = static_cast<int>(idx / spec.steps);  // β₂ along x
    const auto j = static_cast<int>(idx % spec.steps);  // β₃ along y, upwards
    const auto it = colors.find(cells[idx].equilibrium);
    const std::string fill = it == colors.end() ? "#eeeeee" : it->second;
    out << "<rect x=\"" << i * px << "\" y=\"" << size - (j + 1) * px << "\" width=\"" << px << "\" height=\"" << px
        << "\" fill=\"" << fill << "\"/>\n";
  }
  int y = 20;
  for (const auto& [label, fill] : colors) {
    out << "<rect x=\"" << size + 10 << "\" y=\"" << y - 10 << "\" width=\"12\" height=\"12\" fill=\"" << fill
        << "\"/><text x=\"" << size + 28 << "\" y=\"" << y << "\" font-size=\"12\">" << label << "</text>\n";
    y += 20;
  }
  out << "</svg>\n";
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Collective drawdown search: scopes, exit waves, welfare and Monte Carlo checks"};
  app.require_subcommand(1);
  std::string config_path;
  std::string mode = "eq";
  std::string out_path;
  std::string dump_path;
  std::string svg_path;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  bool strict = false;

  auto add_config = [&](CLI::App* sub) { sub->add_option("config", config_path, "scenario JSON file")->required(); };
  auto add_out = [&](CLI::App* sub) { sub->add_option("--out", out_path, "write the table to this file"); };

  auto* validate = app.add_subcommand("validate", "parse and validate a scenario, echo it normalized");
  add_config(validate);
  add_out(validate);
  auto* solve = app.add_subcommand("solve", "scope profile and drawdowns of the full team");
  add_config(solve);
  add_out(solve);
  solve->add_option("--mode", mode, "eq or sp")->check(CLI::IsMember({"eq", "sp"}));
  auto* schedule = app.add_subcommand("schedule", "exit waves (eq) or optimal alliance chain (sp) with welfare");
  add_config(schedule);
  add_out(schedule);
  schedule->add_option("--mode", mode, "eq or sp")->check(CLI::IsMember({"eq", "sp"}));
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo check of the analytic payoffs");
  add_config(simulate);
  add_out(simulate);
  simulate->add_option("--mode", mode, "eq, sp or penalty")->check(CLI::IsMember({"eq", "sp", "penalty"}));
  auto* seed_opt = simulate->add_option("--seed", seed, "override the scenario seed");
  simulate->add_flag("--strict", strict, "fail when more than 1% of paths are censored");
  simulate->add_option("--dump-samples", dump_path, "write per-path samples to this file");
  auto* sim_threads = simulate->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  auto* scan = app.add_subcommand("scan", "exit-wave partitions over the (beta2, beta3) grid");
  add_config(scan);
  add_out(scan);
  scan->add_option("--svg", svg_path, "also write a region map");
  auto* scan_threads = scan->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    const ScenarioConfig config = load_scenario(config_path);
    std::ofstream file;
    if (!out_path.empty()) {
      file.open(out_path);
      if (!file) throw std::runtime_error("cannot write output file '" + out_path + "'");
    }
    std::ostream& sink = out_path.empty() ? out : file;

    if (*validate) {
      sink << scenario_to_json(config).dump(2) << '\n';
    } else if (*solve) {
      cmd_solve(config, mode, sink);
    } else if (*schedule) {
      cmd_schedule(config, mode, sink);
    } else if (*simulate) {
      SimConfig sim = config.sim.value_or(SimConfig{});
      if (seed_opt->count() > 0) sim.seed = seed;
      if (sim_threads->count() > 0) sim.threads = threads;
      if (strict) sim.strict = true;
      cmd_simulate(config, mode, sim, dump_path, sink, err);
    } else if (*scan) {
      const auto cells = exit_wave_scan(config, scan_threads->count() > 0 ? threads : 1);
      write_scan_csv(cells, sink);
      if (!svg_path.empty()) {
        std::ofstream svg(svg_path);
        if (!svg) throw std::runtime_error("cannot write '" + svg_path + "'");
        write_scan_svg(cells, *config.scan, svg);
      }
    }
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace exitwaves
