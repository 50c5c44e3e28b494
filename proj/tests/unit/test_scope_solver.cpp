#include <cmath>
#include <random>

#include "doctest.h"
#include "exitwaves/errors.hpp"
#include "exitwaves/scope_solver.hpp"
#include "support.hpp"

using namespace exitwaves;

namespace {

double max_equilibrium_residual(const ScopeProfile& p, std::span<const CostSpec> costs) {
  double worst = 0.0;
  for (std::size_t k = 0; k < p.alliance.size(); ++k) {
    worst = std::max(worst, std::abs(ratio_2c_over_cprime(costs[p.alliance[k]], p.per_agent[k]) - p.total));
  }
  return worst;
}

}  // namespace

TEST_SUITE("scope_solver") {
  TEST_CASE("single exponential agent") {
    const auto costs = support::exponential_team({1.0});
    const auto p = solve_equilibrium_scopes(Alliance{0}, costs, {0.1, 10.0});
    CHECK(p.total == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(p.interior);
    const auto q = solve_planner_scopes(Alliance{0}, costs, {0.1, 10.0});
    CHECK(q.total == doctest::Approx(p.total).epsilon(1e-10));
  }

  TEST_CASE("symmetric exponential pair splits equally") {
    const auto costs = support::exponential_team({1.0, 1.0});
    const auto p = solve_equilibrium_scopes(Alliance{0, 1}, costs, {0.1, 10.0});
    CHECK(p.total == doctest::Approx(2.0));
    CHECK(p.per_agent[0] == doctest::Approx(1.0));
    CHECK(p.per_agent[1] == doctest::Approx(1.0));
    CHECK(p.degenerate);
    CHECK(max_equilibrium_residual(p, costs) <= 1e-10);
    const auto q = solve_planner_scopes(Alliance{0, 1}, costs, {0.1, 10.0});
    CHECK(q.total == doctest::Approx(4.0).epsilon(1e-10));
    CHECK(q.per_agent[0] == doctest::Approx(2.0).epsilon(1e-10));
  }

  TEST_CASE("quadratic pair is pushed to the lower bound") {
    // ratio(σ) = σ is below S = σ₁ + σ₂ everywhere, so each agent's cost per
    // speed rises in its own scope and the consistent corner is lo.
    const std::vector<CostSpec> costs{power_cost(1.0, 2.0), power_cost(1.0, 2.0)};
    const auto p = solve_equilibrium_scopes(Alliance{0, 1}, costs, {0.5, 5.0});
    CHECK_FALSE(p.interior);
    CHECK(p.per_agent[0] == doctest::Approx(0.5));
    CHECK(p.per_agent[1] == doctest::Approx(0.5));
    for (std::size_t k = 0; k < 2; ++k) CHECK(ratio_2c_over_cprime(costs[k], p.per_agent[k]) <= p.total);
  }

  TEST_CASE("planner exponential closed form") {
    const auto costs = support::exponential_team({1.0, 1.2, 2.0});
    const auto p = solve_planner_scopes(Alliance{0, 1, 2}, costs, {0.1, 10.0});
    const double log_lambda = 2.0 - (std::log(1.0) + std::log(1.2) + std::log(2.0)) / 3.0;
    CHECK(log_lambda == doctest::Approx(1.70818).epsilon(1e-5));
    CHECK(p.total == doctest::Approx(6.0).epsilon(1e-10));
    for (std::size_t k = 0; k < 3; ++k) {
      const double beta = std::get<ScaledExponential>(costs[k].family).beta;
      CHECK(std::abs(p.per_agent[k] - (log_lambda + std::log(beta))) <= 1e-10);
    }
    const double lambda = eval_dcost(costs[0], p.per_agent[0]);
    CHECK(std::abs(2.0 * total_cost_rate(p, costs) - lambda * p.total) <= 1e-10 * lambda * p.total);
    for (std::size_t k = 1; k < 3; ++k) CHECK(std::abs(eval_dcost(costs[k], p.per_agent[k]) - lambda) <= 1e-9 * lambda);
  }

  TEST_CASE("interior capacity") {
    CHECK(interior_capacity(exponential_cost(1.0), {0.1, 10.0}) == 20);
    CHECK(interior_capacity(exponential_cost(1.0), {2.0, 10.0}) == 1);
    CHECK(interior_capacity(exponential_cost(2.0), {0.1, 10.0}) == 10);
  }

  TEST_CASE("proportional interior scopes are equal") {
    const std::vector<CostSpec> aq{affine_quadratic_cost(1.0, 0.0, 10.0), affine_quadratic_cost(0.5, 0.0, 5.0),
                                   affine_quadratic_cost(0.25, 0.0, 2.5)};
    const auto p = solve_equilibrium_scopes(Alliance{0, 1, 2}, aq, {0.05, 3.0});
    REQUIRE(p.interior);
    // σ + 10/σ = 3σ
    CHECK(p.per_agent[0] == doctest::Approx(std::sqrt(5.0)).epsilon(1e-10));
    CHECK(p.per_agent[0] == doctest::Approx(p.per_agent[1]).epsilon(1e-10));
    CHECK(p.per_agent[0] == doctest::Approx(p.per_agent[2]).epsilon(1e-10));
    CHECK(max_equilibrium_residual(p, aq) <= 1e-10);
    const auto e = solve_equilibrium_scopes(Alliance{0, 1, 2}, support::exponential_team({1.0, 3.0, 9.0}), {0.1, 10.0});
    CHECK(e.per_agent[0] == doctest::Approx(e.per_agent[2]));
  }

  TEST_CASE("clipped agents satisfy the corner inequalities") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> a0(0.5, 40.0);
    std::uniform_real_distribution<double> a1(0.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
      std::vector<CostSpec> costs;
      for (int i = 0; i < 3; ++i) costs.push_back(affine_quadratic_cost(1.0, a1(rng), a0(rng)));
      const ScopeBounds b{0.1, 2.0};
      const auto p = solve_equilibrium_scopes(Alliance{0, 1, 2}, costs, b);
      double sum = 0.0;
      for (std::size_t k = 0; k < 3; ++k) {
        const double s = p.per_agent[k];
        const double r = ratio_2c_over_cprime(costs[k], s);
        sum += s;
        CHECK(s >= b.lo);
        CHECK(s <= b.hi);
        if (s >= b.hi) CHECK(r >= p.total - 1e-9);
        else if (s <= b.lo) CHECK(r <= p.total + 1e-9);
        else CHECK(std::abs(r - p.total) <= 1e-9 * std::max(1.0, p.total));
      }
      CHECK(std::abs(sum - p.total) <= 1e-12 * std::max(1.0, p.total));
    }
  }

  TEST_CASE("validation failure propagates") {
    const std::vector<CostSpec> costs{exponential_cost(1.0, 0.5)};
    CHECK_THROWS_AS(solve_equilibrium_scopes(Alliance{0}, costs, {0.1, 10.0}), ValidationError);
    CHECK_THROWS_AS(solve_equilibrium_scopes(Alliance{}, costs, {0.1, 10.0}), ValidationError);
  }
}
