#include <cmath>
#include <numbers>

#include "doctest.h"
#include "exitwaves/equilibrium_engine.hpp"
#include "exitwaves/errors.hpp"
#include "exitwaves/planner_engine.hpp"
#include "exitwaves/welfare_eval.hpp"
#include "oracles/oracles.hpp"
#include "support.hpp"

using namespace exitwaves;

namespace {
const double e = std::numbers::e;
const ScopeBounds kBounds{0.1, 10.0};
}  // namespace

TEST_SUITE("welfare_eval") {
  TEST_CASE("phase statistics") {
    auto a = phase_stats(0.0, 1.0, 1.0);
    CHECK(a.expected_max_gain == doctest::Approx(1.0));
    CHECK(a.expected_duration == doctest::Approx(1.0));
    auto b = phase_stats(0.5, 1.0, 2.0);
    CHECK(b.expected_max_gain == doctest::Approx(0.5));
    CHECK(b.expected_duration == doctest::Approx(0.1875));
    auto c = phase_stats(1.0 - 1e-12, 1.0, 1.0);
    CHECK(c.expected_max_gain == doctest::Approx(0.0));
    CHECK(c.expected_duration == doctest::Approx(0.0));
    CHECK_THROWS_AS(phase_stats(1.0, 1.0, 1.0), ValidationError);
    CHECK_THROWS_AS(phase_stats(-0.1, 1.0, 1.0), ValidationError);
  }

  TEST_CASE("phase durations match the Green-function quadrature") {
    for (double g0 : {0.0, 0.2, 0.5, 0.9}) {
      for (double s : {0.5, 1.0, 2.0}) {
        CHECK(phase_stats(g0, 1.0, s).expected_duration ==
              doctest::Approx(oracle::green_expected_duration(g0, 1.0, s)).epsilon(1e-10));
      }
    }
  }

  TEST_CASE("phase statistics match the lattice walk") {
    // Exact lattice expectation: steps·h² = d² − g0² + h(d − g0).
    const double h = 1e-3;
    const int n = 1000;
    const int start = 400;
    const double lattice = oracle::lattice_expected_steps(start, n) * h * h;
    CHECK(lattice == doctest::Approx(phase_stats(start * h, n * h, 1.0).expected_duration).epsilon(2e-3));
    const auto walk = oracle::random_walk_drawdown(0.5, 1.0, 2.0, 0.02, 20000, 42);
    std::vector<double> gains;
    std::vector<double> times;
    for (const auto& w : walk) {
      gains.push_back(w.max_gain);
      times.push_back(w.duration);
    }
    const auto g = oracle::mean_se(gains);
    const auto t = oracle::mean_se(times);
    const auto exact = phase_stats(0.5, 1.0, 2.0);
    CHECK(std::abs(g.mean - exact.expected_max_gain) <= 3 * g.se);
    // The walk adds h(d − g0)/S² to the duration.
    CHECK(std::abs(t.mean - exact.expected_duration - 0.02 * 0.5 / 4.0) <= 3 * t.se);
  }

  TEST_CASE("single agent value") {
    const auto costs = support::exponential_team({1.0});
    const auto s = equilibrium_exit_schedule(Alliance{0}, costs, kBounds);
    const auto w = equilibrium_payoffs(s, costs);
    CHECK(w.per_agent[0] == doctest::Approx(1.0 / (e * e)).epsilon(1e-12));
    CHECK(solo_search_payoff(costs[0], kBounds) == doctest::Approx(1.0 / (e * e)).epsilon(1e-12));
  }

  TEST_CASE("three-agent equilibrium and planner totals") {
    const auto costs = support::exponential_team({1.0, 1.2, 2.0});
    const Alliance team{0, 1, 2};
    const auto eq = equilibrium_payoffs(equilibrium_exit_schedule(team, costs, kBounds), costs);
    const double d = 2.0 * std::exp(-2.0 / 3.0);
    double expected = 0.0;
    for (double beta : {1.0, 1.2, 2.0}) expected += d - std::exp(2.0 / 3.0) / beta * d * d / 4.0;
    CHECK(eq.total == doctest::Approx(expected).epsilon(1e-12));
    CHECK(eq.total == doctest::Approx(1.882).epsilon(1e-3));
    const auto sp = brute_force_optimal_sequence(team, costs, kBounds);
    const double c = total_cost_rate(sp.chain.scopes[0], costs);
    CHECK(sp.welfare.total == doctest::Approx(9.0 * 36.0 / (4.0 * c)).epsilon(1e-10));
    CHECK(sp.welfare.total == doctest::Approx(4.893).epsilon(1e-3));
    double sum = 0.0;
    for (double v : sp.welfare.per_agent) sum += v;
    CHECK(std::abs(sum - sp.welfare.total) <= 1e-12);
  }

  TEST_CASE("two-phase value matches quadrature") {
    const auto costs = support::exponential_team({1.0, 1.2, 8.0});
    const auto s = equilibrium_exit_schedule(Alliance{0, 1, 2}, costs, kBounds);
    REQUIRE(s.size() == 2);
    const auto w = equilibrium_payoffs(s, costs);
    const double d1 = s.waves[0].trigger;
    const double d2 = s.waves[1].trigger;
    const double t1 = oracle::green_expected_duration(0.0, d1, s.waves[0].scopes.total);
    const double t2 = oracle::green_expected_duration(d1, d2, s.waves[1].scopes.total);
    const double c1 = eval_cost(costs[0], s.waves[0].scopes.scope_of(0));
    const double c3a = eval_cost(costs[2], s.waves[0].scopes.scope_of(2));
    const double c3b = eval_cost(costs[2], s.waves[1].scopes.scope_of(2));
    CHECK(w.per_agent[0] == doctest::Approx(d1 - c1 * t1).epsilon(1e-10));
    CHECK(w.per_agent[2] == doctest::Approx(d2 - c3a * t1 - c3b * t2).epsilon(1e-10));
    REQUIRE(w.per_phase.size() == 2);
    CHECK(w.per_phase[1].expected_duration > 0.0);
  }

  TEST_CASE("participation") {
    for (const auto& betas : std::vector<std::vector<double>>{{1.0, 1.2, 2.0}, {1.0, 1.2, 8.0}, {1.0, 3.0}, {1.0, 1.0}}) {
      const auto costs = support::exponential_team(betas);
      const auto w = equilibrium_payoffs(equilibrium_exit_schedule(Alliance::full_team(betas.size()), costs, kBounds), costs);
      for (std::size_t i = 0; i < betas.size(); ++i) CHECK(w.per_agent[i] >= solo_search_payoff(costs[i], kBounds));
    }
  }

  TEST_CASE("rejects gated or infeasible plans") {
    const auto costs = support::exponential_team({1.0, 2.0});
    auto plan = to_plan(equilibrium_exit_schedule(Alliance{0, 1}, costs, kBounds), 2);
    plan.phases[0].joint_exit_at = 1.0;
    CHECK_THROWS_AS(chain_welfare(plan, costs), ValidationError);
    plan.phases[0].joint_exit_at = INFINITY;
    plan.phases[0].stop_gap = -1.0;
    CHECK_THROWS_AS(chain_welfare(plan, costs), ValidationError);
  }
}
