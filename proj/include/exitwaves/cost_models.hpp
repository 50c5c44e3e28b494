#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace exitwaves {

/// c(σ) = exp(rate·σ) / beta
struct ScaledExponential {
  double rate = 1.0;
  double beta = 1.0;
};

/// c(σ) = coefficient·σ^exponent / beta
struct ScaledPower {
  double coefficient = 1.0;
  double exponent = 2.0;
  double beta = 1.0;
};

/// c(σ) = a2·σ² + a1·σ + a0
struct AffineQuadratic {
  double a2 = 1.0;
  double a1 = 0.0;
  double a0 = 1.0;
};

/// Flow cost of search scope for one agent. Only parametric families are
/// admitted so that every derivative used by the solvers is exact.
struct CostSpec {
  std::variant<ScaledExponential, ScaledPower, AffineQuadratic> family;

  [[nodiscard]] std::string family_name() const;
  /// True when 2c/c' does not depend on σ (the exponential family).
  [[nodiscard]] bool has_constant_ratio() const noexcept;
};

inline CostSpec exponential_cost(double rate, double beta = 1.0) { return {ScaledExponential{rate, beta}}; }
inline CostSpec power_cost(double coefficient, double exponent, double beta = 1.0) {
  return {ScaledPower{coefficient, exponent, beta}};
}
inline CostSpec affine_quadratic_cost(double a2, double a1, double a0) { return {AffineQuadratic{a2, a1, a0}}; }

struct ScopeBounds {
  double lo = 0.1;
  double hi = 10.0;
};

/// Throws ValidationError unless 0 < lo ≤ hi and both are finite.
void check_bounds(const ScopeBounds& bounds);

// Evaluation. σ must be finite and non-negative; a non-finite result raises std::domain_error.
double eval_cost(const CostSpec& spec, double sigma);
double eval_dcost(const CostSpec& spec, double sigma);
double eval_d2cost(const CostSpec& spec, double sigma);
/// 2c(σ)/c'(σ); equals 2/rate for the exponential family.
double ratio_2c_over_cprime(const CostSpec& spec, double sigma);
/// Smallest σ ≥ 0 with c'(σ) = marginal (0 when c'(0) ≥ marginal).
double inverse_marginal(const CostSpec& spec, double marginal);

inline constexpr double kConvexityFloor = 1e-9;
inline constexpr int kValidationGridPoints = 1001;

struct ValidationReport {
  bool valid = true;
  bool log_convex = false;
  std::vector<std::string> issues;
};

/// Parameter checks plus a uniform-grid check of c > 0, c' > 0, c'' ≥ 1e-9 on
/// the bounds. The log-convexity flag is c·c'' − c'² ≥ 0 (with a relative
/// rounding allowance) at every grid point.
ValidationReport validate_spec(const CostSpec& spec, const ScopeBounds& bounds);

/// Throws ValidationError naming the agent when any spec fails validation.
void require_valid(std::span<const CostSpec> costs, const ScopeBounds& bounds);

/// Same family and shape, differing only by a positive multiplier.
bool proportional(const CostSpec& a, const CostSpec& b);

/// When every spec is proportional to the first one, returns the multipliers
/// β_i = c_0/c_i (so β_0 = 1). Otherwise nullopt.
std::optional<std::vector<double>> proportional_multipliers(std::span<const CostSpec> costs);

/// Proportional costs whose multipliers strictly increase with the agent index
/// (agent 0 carries the highest cost).
bool well_ordered(std::span<const CostSpec> costs);

}  // namespace exitwaves
