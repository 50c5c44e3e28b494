#include <cmath>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "exitwaves/cost_models.hpp"
#include "exitwaves/errors.hpp"

using namespace exitwaves;

TEST_SUITE("cost_models") {
  TEST_CASE("family formulas") {
    CHECK(eval_cost(exponential_cost(1.0), 0.0) == doctest::Approx(1.0));
    CHECK(eval_cost(exponential_cost(1.0, 1.2), 1.0) == doctest::Approx(std::numbers::e / 1.2).epsilon(1e-14));
    CHECK(eval_cost(power_cost(1.0, 2.0), 3.0) == doctest::Approx(9.0));
    CHECK(eval_dcost(exponential_cost(2.0), 0.0) == doctest::Approx(2.0));
    CHECK(eval_dcost(power_cost(1.0, 2.0), 3.0) == doctest::Approx(6.0));
    CHECK(eval_dcost(affine_quadratic_cost(1.0, 0.0, 1.0), 2.0) == doctest::Approx(4.0));
  }

  TEST_CASE("ratio 2c/c'") {
    for (double s : {0.1, 1.0, 7.5}) {
      CHECK(ratio_2c_over_cprime(exponential_cost(1.0, 3.0), s) == doctest::Approx(2.0));
      CHECK(ratio_2c_over_cprime(power_cost(2.5, 2.0), s) == doctest::Approx(s));
    }
    CHECK(ratio_2c_over_cprime(affine_quadratic_cost(1.0, 0.0, 1.0), 1.0) == doctest::Approx(2.0));
    CHECK(exponential_cost(1.0).has_constant_ratio());
    CHECK_FALSE(power_cost(1.0, 3.0).has_constant_ratio());
  }

  TEST_CASE("non-finite evaluation is a domain error") {
    CHECK_THROWS_AS(eval_cost(exponential_cost(1.0), 1e6), std::domain_error);
    CHECK_THROWS_AS(eval_cost(exponential_cost(1.0), -1.0), std::domain_error);
    CHECK_THROWS_AS(eval_dcost(power_cost(1.0, 2.0), std::nan("")), std::domain_error);
  }

  TEST_CASE("validation") {
    const auto exp_report = validate_spec(exponential_cost(1.0), {0.1, 10.0});
    CHECK(exp_report.valid);
    CHECK(exp_report.log_convex);
    const auto pow_report = validate_spec(power_cost(1.0, 2.0), {0.5, 5.0});
    CHECK(pow_report.valid);
    CHECK_FALSE(pow_report.log_convex);
    CHECK_FALSE(validate_spec(affine_quadratic_cost(-1.0, 0.0, 1.0), {0.1, 10.0}).valid);
    CHECK_FALSE(validate_spec(exponential_cost(1.0, 0.5), {0.1, 10.0}).valid);
    CHECK_FALSE(validate_spec(power_cost(1.0, 1.5), {0.1, 10.0}).valid);
    CHECK_FALSE(validate_spec(exponential_cost(1.0), {2.0, 1.0}).valid);
    CHECK_THROWS_AS(check_bounds({0.0, 1.0}), ValidationError);
    const std::vector<CostSpec> bad{exponential_cost(1.0), exponential_cost(-1.0)};
    CHECK_THROWS_WITH_AS(require_valid(bad, {0.1, 10.0}), doctest::Contains("agent 2"), ValidationError);
  }

  TEST_CASE("derivatives match centered differences") {
    const std::vector<CostSpec> specs{exponential_cost(1.0, 1.3), exponential_cost(0.4, 2.0), power_cost(0.7, 2.0, 1.5),
                                      power_cost(1.1, 3.5), affine_quadratic_cost(1.0, 0.3, 2.0)};
    for (const auto& spec : specs) {
      for (int k = 0; k <= 20; ++k) {
        const double s = 0.2 + 4.8 * k / 20.0;
        const double h = 1e-5 * std::max(1.0, s);
        const double fd1 = (eval_cost(spec, s + h) - eval_cost(spec, s - h)) / (2 * h);
        const double fd2 = (eval_dcost(spec, s + h) - eval_dcost(spec, s - h)) / (2 * h);
        CHECK(eval_dcost(spec, s) == doctest::Approx(fd1).epsilon(1e-6));
        CHECK(eval_d2cost(spec, s) == doctest::Approx(fd2).epsilon(1e-6));
      }
    }
  }

  TEST_CASE("ratio is non-increasing exactly when log-convex") {
    const ScopeBounds b{0.2, 5.0};
    const std::vector<CostSpec> specs{exponential_cost(1.0), power_cost(1.0, 2.0), power_cost(1.0, 4.0),
                                      affine_quadratic_cost(1.0, 0.0, 1.0), affine_quadratic_cost(1.0, 0.1, 30.0)};
    for (const auto& spec : specs) {
      bool non_increasing = true;
      double prev = ratio_2c_over_cprime(spec, b.lo);
      for (int k = 1; k < kValidationGridPoints; ++k) {
        const double s = b.lo + (b.hi - b.lo) * k / (kValidationGridPoints - 1);
        const double r = ratio_2c_over_cprime(spec, s);
        if (r > prev * (1 + 1e-12) + 1e-15) non_increasing = false;
        prev = r;
      }
      CHECK(non_increasing == validate_spec(spec, b).log_convex);
    }
  }

  TEST_CASE("multiplier scaling") {
    for (double s : {0.1, 1.0, 3.0}) {
      CHECK(eval_cost(exponential_cost(1.5, 4.0), s) == doctest::Approx(eval_cost(exponential_cost(1.5), s) / 4.0));
      CHECK(eval_cost(power_cost(2.0, 3.0, 2.5), s) == doctest::Approx(eval_cost(power_cost(2.0, 3.0), s) / 2.5));
    }
  }

  TEST_CASE("proportionality") {
    const std::vector<CostSpec> team{exponential_cost(1.0, 1.0), exponential_cost(1.0, 1.2), exponential_cost(1.0, 2.0)};
    const auto betas = proportional_multipliers(team);
    REQUIRE(betas);
    CHECK((*betas)[1] == doctest::Approx(1.2));
    CHECK(well_ordered(team));
    const std::vector<CostSpec> flipped{exponential_cost(1.0, 2.0), exponential_cost(1.0, 1.2)};
    CHECK_FALSE(well_ordered(flipped));
    const std::vector<CostSpec> mixed{exponential_cost(1.0), exponential_cost(2.0)};
    CHECK_FALSE(proportional_multipliers(mixed));
    CHECK(proportional(power_cost(1.0, 2.0), power_cost(3.0, 2.0, 2.0)));
  }
}
