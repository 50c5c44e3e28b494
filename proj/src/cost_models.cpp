#include "exitwaves/cost_models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "exitwaves/errors.hpp"

namespace exitwaves {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_sigma(double sigma) {
  if (!std::isfinite(sigma) || sigma < 0.0) {
    std::ostringstream msg;
    msg << "scope must be finite and non-negative, got " << sigma;
    throw std::domain_error(msg.str());
  }
}

double finite_or_throw(double v, const char* what) {
  if (!std::isfinite(v)) throw std::domain_error(std::string(what) + " is not finite");
  return v;
}

}  // namespace

std::string CostSpec::family_name() const {
  return std::visit(Overloaded{[](const ScaledExponential&) { return std::string("ScaledExponential"); },
                               [](const ScaledPower&) { return std::string("ScaledPower"); },
                               [](const AffineQuadratic&) { return std::string("AffineQuadratic"); }},
                    family);
}

bool CostSpec::has_constant_ratio() const noexcept { return std::holds_alternative<ScaledExponential>(family); }

void check_bounds(const ScopeBounds& bounds) {
  if (!std::isfinite(bounds.lo) || !std::isfinite(bounds.hi) || !(bounds.lo > 0.0) || bounds.hi < bounds.lo) {
    std::ostringstream msg;
    msg << "scope bounds must satisfy 0 < lo <= hi, got [" << bounds.lo << ", " << bounds.hi << "]";
    throw ValidationError(msg.str());
  }
}

double eval_cost(const CostSpec& spec, double sigma) {
  check_sigma(sigma);
  const double v = std::visit(
      Overloaded{[&](const ScaledExponential& f) { return std::exp(f.rate * sigma) / f.beta; },
                 [&](const ScaledPower& f) { return f.coefficient * std::pow(sigma, f.exponent) / f.beta; },
                 [&](const AffineQuadratic& f) { return (f.a2 * sigma + f.a1) * sigma + f.a0; }},
      spec.family);
  return finite_or_throw(v, "cost");
}

double eval_dcost(const CostSpec& spec, double sigma) {
  check_sigma(sigma);
  const double v = std::visit(
      Overloaded{[&](const ScaledExponential& f) { return f.rate * std::exp(f.rate * sigma) / f.beta; },
                 [&](const ScaledPower& f) {
                   return f.coefficient * f.exponent * std::pow(sigma, f.exponent - 1.0) / f.beta;
                 },
                 [&](const AffineQuadratic& f) { return 2.0 * f.a2 * sigma + f.a1; }},
      spec.family);
  return finite_or_throw(v, "marginal cost");
}

double eval_d2cost(const CostSpec& spec, double sigma) {
  check_sigma(sigma);
  const double v = std::visit(
      Overloaded{[&](const ScaledExponential& f) { return f.rate * f.rate * std::exp(f.rate * sigma) / f.beta; },
                 [&](const ScaledPower& f) {
                   return f.coefficient * f.exponent * (f.exponent - 1.0) * std::pow(sigma, f.exponent - 2.0) /
                          f.beta;
                 },
                 [&](const AffineQuadratic& f) { return 2.0 * f.a2; }},
      spec.family);
  return finite_or_throw(v, "cost curvature");
}

double ratio_2c_over_cprime(const CostSpec& spec, double sigma) {
  check_sigma(sigma);
  // Closed forms avoid overflow of c and c' individually.
  const double v = std::visit(Overloaded{[&](const ScaledExponential& f) { return 2.0 / f.rate; },
                                         [&](const ScaledPower& f) { return 2.0 * sigma / f.exponent; },
                                         [&](const AffineQuadratic& f) {
                                           return 2.0 * ((f.a2 * sigma + f.a1) * sigma + f.a0) /
                                                  (2.0 * f.a2 * sigma + f.a1);
                                         }},
                              spec.family);
  return finite_or_throw(v, "cost ratio");
}

double inverse_marginal(const CostSpec& spec, double marginal) {
  if (!std::isfinite(marginal)) throw std::domain_error("marginal cost level is not finite");
  if (marginal <= 0.0) return 0.0;
  const double v = std::visit(Overloaded{[&](const ScaledExponential& f) {
                                           return std::log(marginal * f.beta / f.rate) / f.rate;
                                         },
                                         [&](const ScaledPower& f) {
                                           return std::pow(marginal * f.beta / (f.coefficient * f.exponent),
                                                           1.0 / (f.exponent - 1.0));
                                         },
                                         [&](const AffineQuadratic& f) { return (marginal - f.a1) / (2.0 * f.a2); }},
                              spec.family);
  return v > 0.0 ? v : 0.0;
}

ValidationReport validate_spec(const CostSpec& spec, const ScopeBounds& bounds) {
  ValidationReport report;
  auto fail = [&](std::string issue) {
    report.valid = false;
    report.issues.push_back(std::move(issue));
  };

  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  std::visit(Overloaded{[&](const ScaledExponential& f) {
                          if (!positive(f.rate)) fail("ScaledExponential rate must be > 0");
                          if (!std::isfinite(f.beta) || f.beta < 1.0) fail("ScaledExponential beta must be >= 1");
                        },
                        [&](const ScaledPower& f) {
                          if (!positive(f.coefficient)) fail("ScaledPower coefficient must be > 0");
                          if (!std::isfinite(f.exponent) || f.exponent < 2.0) fail("ScaledPower exponent must be >= 2");
                          if (!std::isfinite(f.beta) || f.beta < 1.0) fail("ScaledPower beta must be >= 1");
                        },
                        [&](const AffineQuadratic& f) {
                          if (!positive(f.a2)) fail("AffineQuadratic a2 must be > 0 (c'' < 0 otherwise)");
                          if (!std::isfinite(f.a1) || f.a1 < 0.0) fail("AffineQuadratic a1 must be >= 0");
                          if (!positive(f.a0)) fail("AffineQuadratic a0 must be > 0");
                        }},
             spec.family);

  if (!std::isfinite(bounds.lo) || !std::isfinite(bounds.hi) || !(bounds.lo > 0.0) || bounds.hi < bounds.lo) {
    fail("scope bounds must satisfy 0 < lo <= hi");
  }
  if (!report.valid) return report;

  bool log_convex = true;
  bool reported_c = false, reported_dc = false, reported_d2c = false;
  for (int k = 0; k < kValidationGridPoints; ++k) {
    const double s = bounds.lo + (bounds.hi - bounds.lo) * k / (kValidationGridPoints - 1);
    double c = 0.0, dc = 0.0, d2c = 0.0;
    try {
      c = eval_cost(spec, s);
      dc = eval_dcost(spec, s);
      d2c = eval_d2cost(spec, s);
    } catch (const std::domain_error& e) {
      fail(std::string("non-finite cost on the bounds: ") + e.what());
      return report;
    }
    auto at = [s] {
      std::ostringstream msg;
      msg << " at sigma=" << s;
      return msg.str();
    };
    if (!(c > 0.0) && !reported_c) {
      fail("cost is not positive" + at());
      reported_c = true;
    }
    if (!(dc > 0.0) && !reported_dc) {
      fail("cost is not increasing" + at());
      reported_dc = true;
    }
    if (!(d2c >= kConvexityFloor) && !reported_d2c) {
      fail("cost is not strongly convex" + at());
      reported_d2c = true;
    }
    if (c * d2c - dc * dc < -1e-12 * dc * dc) log_convex = false;
  }
  report.log_convex = report.valid && log_convex;
  return report;
}

void require_valid(std::span<const CostSpec> costs, const ScopeBounds& bounds) {
  check_bounds(bounds);
  for (std::size_t i = 0; i < costs.size(); ++i) {
    const auto report = validate_spec(costs[i], bounds);
    if (!report.valid) {
      std::ostringstream msg;
      msg << "agent " << (i + 1) << " (" << costs[i].family_name() << "): ";
      for (std::size_t k = 0; k < report.issues.size(); ++k) msg << (k ? "; " : "") << report.issues[k];
      throw ValidationError(msg.str());
    }
  }
}

bool proportional(const CostSpec& a, const CostSpec& b) {
  if (a.family.index() != b.family.index()) return false;
  constexpr double tol = 1e-12;
  auto close = [](double x, double y) { return std::abs(x - y) <= tol * std::max({1.0, std::abs(x), std::abs(y)}); };
  if (const auto* ea = std::get_if<ScaledExponential>(&a.family)) {
    return close(ea->rate, std::get<ScaledExponential>(b.family).rate);
  }
  if (const auto* pa = std::get_if<ScaledPower>(&a.family)) {
    return close(pa->exponent, std::get<ScaledPower>(b.family).exponent);
  }
  const auto& qa = std::get<AffineQuadratic>(a.family);
  const auto& qb = std::get<AffineQuadratic>(b.family);
  const double k = qb.a2 / qa.a2;
  return close(qa.a1 * k, qb.a1) && close(qa.a0 * k, qb.a0);
}

std::optional<std::vector<double>> proportional_multipliers(std::span<const CostSpec> costs) {
  if (costs.empty()) return std::nullopt;
  std::vector<double> betas;
  betas.reserve(costs.size());
  const double ref = eval_cost(costs[0], 1.0);
  for (const auto& c : costs) {
    if (!proportional(costs[0], c)) return std::nullopt;
    betas.push_back(ref / eval_cost(c, 1.0));
  }
  return betas;
}

bool well_ordered(std::span<const CostSpec> costs) {
  const auto betas = proportional_multipliers(costs);
  if (!betas) return false;
  for (std::size_t i = 1; i < betas->size(); ++i) {
    if (!((*betas)[i] > (*betas)[i - 1])) return false;
  }
  return true;
}

}  // namespace exitwaves
