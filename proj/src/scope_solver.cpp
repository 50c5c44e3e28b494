#include "exitwaves/scope_solver.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "exitwaves/errors.hpp"

namespace exitwaves {
namespace {

// Above this many branch patterns per grid point only the smallest responses are tracked.
constexpr std::size_t kMaxBranchPatterns = 4096;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool same_rate(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); }

template <class F>
double bisect(F&& f, double a, double b) {
  // Requires f(a) and f(b) of opposite sign (or zero at an endpoint).
  double fa = f(a);
  if (fa == 0.0) return a;
  for (int it = 0; it < kMaxBisectionIterations; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    if (std::abs(b - a) <= kRootTolerance * 1e-3 * std::max(1.0, std::abs(mid))) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (fa > 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

// Best-response branches of one agent against a fixed alliance total S. The
// agent minimises c(σ)/S², whose σ-derivative has the sign of c'(σ)·(S − ratio(σ)),
// S moving one-for-one with σ. Each branch exists on an interval of S and moves
// continuously there:
//   lo          ratio(lo) ≤ S
//   lower/upper roots of ratio(σ) = S strictly inside the bounds that are local
//               minima (ratio' < 1, i.e. c·c''/c'² > 1/2)
//   hi          ratio(hi) ≥ S
enum class Branch : std::uint8_t { lo, lower_root, upper_root, hi };
constexpr std::array<Branch, 4> kBranches{Branch::lo, Branch::lower_root, Branch::upper_root, Branch::hi};

bool local_minimum(const CostSpec& cost, double s) {
  const double d = eval_dcost(cost, s);
  return eval_cost(cost, s) * eval_d2cost(cost, s) > 0.5 * d * d * (1.0 + 1e-12);
}

std::optional<double> branch_scope(const CostSpec& cost, Branch branch, double total, const ScopeBounds& bounds) {
  switch (branch) {
    case Branch::lo:
      if (ratio_2c_over_cprime(cost, bounds.lo) <= total) return bounds.lo;
      return std::nullopt;
    case Branch::hi:
      if (ratio_2c_over_cprime(cost, bounds.hi) >= total) return bounds.hi;
      return std::nullopt;
    default:
      break;
  }
  std::array<double, 2> roots{};
  int count = 0;
  std::visit(Overloaded{[&](const ScaledExponential&) {},
                        [&](const ScaledPower& f) { roots[count++] = 0.5 * f.exponent * total; },
                        [&](const AffineQuadratic& f) {
                          // a2·σ² + (a1 − a2·S)σ + (a0 − S·a1/2) = 0
                          const double b = f.a1 / f.a2 - total;
                          const double disc = b * b - 4.0 * (f.a0 - 0.5 * total * f.a1) / f.a2;
                          if (disc < 0.0) return;
                          const double q = std::sqrt(disc);
                          roots[count++] = 0.5 * (-b - q);
                          roots[count++] = 0.5 * (-b + q);
                        }},
             cost.family);
  const int pick = branch == Branch::lower_root ? 0 : 1;
  if (pick >= count) return std::nullopt;
  const double s = roots[static_cast<std::size_t>(pick)];
  if (!(s > bounds.lo && s < bounds.hi) || !local_minimum(cost, s)) return std::nullopt;
  return s;
}

// First existing branch in the order lo, lower root, upper root, hi.
double smallest_response(const CostSpec& cost, double total, const ScopeBounds& bounds) {
  if (cost.has_constant_ratio()) return ratio_2c_over_cprime(cost, bounds.lo) > total ? bounds.hi : bounds.lo;
  for (Branch b : kBranches) {
    if (const auto s = branch_scope(cost, b, total, bounds)) return *s;
  }
  return bounds.hi;
}

struct Candidate {
  double total;
  std::vector<double> per_agent;
  bool degenerate;
};

ScopeProfile make_profile(const Alliance& alliance, std::vector<double> per_agent) {
  ScopeProfile p;
  p.alliance = alliance;
  p.per_agent = std::move(per_agent);
  p.total = 0.0;
  for (double s : p.per_agent) p.total += s;
  return p;
}

void require_members(const Alliance& alliance, std::span<const CostSpec> costs) {
  if (alliance.empty()) throw ValidationError("scope solver requires a non-empty alliance");
  for (AgentId a : alliance) {
    if (a >= costs.size()) {
      std::ostringstream msg;
      msg << "agent " << (a + 1) << " has no cost specification";
      throw ValidationError(msg.str());
    }
  }
}

std::string format_totals(const std::vector<double>& totals) {
  std::ostringstream s;
  s.precision(10);
  for (std::size_t i = 0; i < totals.size(); ++i) s << (i ? ", " : "") << totals[i];
  return s.str();
}

}  // namespace

double ScopeProfile::scope_of(AgentId agent) const {
  const auto& m = alliance.members();
  const auto it = std::lower_bound(m.begin(), m.end(), agent);
  if (it == m.end() || *it != agent) {
    std::ostringstream msg;
    msg << "agent " << (agent + 1) << " is not in alliance " << alliance.label();
    throw ValidationError(msg.str());
  }
  return per_agent[static_cast<std::size_t>(it - m.begin())];
}

double total_cost_rate(const ScopeProfile& profile, std::span<const CostSpec> costs) {
  double sum = 0.0;
  for (std::size_t k = 0; k < profile.alliance.size(); ++k) {
    sum += eval_cost(costs[profile.alliance[k]], profile.per_agent[k]);
  }
  return sum;
}

double cost_per_speed(const ScopeProfile& profile, std::span<const CostSpec> costs) {
  return total_cost_rate(profile, costs) / (profile.total * profile.total);
}

ScopeProfile solve_equilibrium_scopes(const Alliance& alliance, std::span<const CostSpec> costs,
                                      const ScopeBounds& bounds) {
  require_members(alliance, costs);
  std::vector<CostSpec> members;
  for (AgentId a : alliance) members.push_back(costs[a]);
  require_valid(members, bounds);

  const std::size_t n = alliance.size();
  auto accept = [](double residual, double total) { return std::abs(residual) <= 1e-9 * std::max(1.0, total); };
  using Pattern = std::vector<Branch>;
  auto scopes_for = [&](const Pattern& pattern, double total) -> std::optional<std::vector<double>> {
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
      const auto s = branch_scope(members[k], pattern[k], total, bounds);
      if (!s) return std::nullopt;
      out[k] = *s;
    }
    return out;
  };
  auto residual_for = [&](const Pattern& pattern, double total) -> std::optional<double> {
    const auto per = scopes_for(pattern, total);
    if (!per) return std::nullopt;
    double sum = 0.0;
    for (double s : *per) sum += s;
    return sum - total;
  };
  // All combinations of branches alive at S, or the smallest responses alone when there are too many.
  auto patterns_at = [&](double total) {
    std::vector<std::vector<Branch>> alive(n);
    std::size_t count = 1;
    for (std::size_t k = 0; k < n; ++k) {
      for (Branch b : kBranches) {
        if (branch_scope(members[k], b, total, bounds)) alive[k].push_back(b);
      }
      if (alive[k].empty()) return std::vector<Pattern>{};
      count = std::min(count * alive[k].size(), kMaxBranchPatterns + 1);
    }
    if (count > kMaxBranchPatterns) {
      Pattern p(n);
      for (std::size_t k = 0; k < n; ++k) p[k] = alive[k].front();
      return std::vector<Pattern>{p};
    }
    std::vector<Pattern> out{Pattern{}};
    for (std::size_t k = 0; k < n; ++k) {
      std::vector<Pattern> next;
      for (const auto& p : out) {
        for (Branch b : alive[k]) {
          next.push_back(p);
          next.back().push_back(b);
        }
      }
      out = std::move(next);
    }
    return out;
  };

  std::vector<Candidate> found;
  auto record = [&](const Pattern& pattern, double total) {
    const auto per = scopes_for(pattern, total);
    if (!per) return;
    double sum = 0.0;
    for (double s : *per) sum += s;
    if (accept(sum - total, total)) found.push_back({total, *per, false});
  };
  // Bisection that stays on one branch pattern; both ends carry a residual of opposite sign.
  auto bisect_pattern = [&](const Pattern& pattern, double a, double ha, double b) {
    for (int it = 0; it < kMaxBisectionIterations; ++it) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      if (std::abs(b - a) <= kRootTolerance * 1e-3 * std::max(1.0, std::abs(mid))) break;
      const auto hm = residual_for(pattern, mid);
      if (!hm) return;
      if (*hm == 0.0) {
        a = b = mid;
        break;
      }
      if ((*hm > 0.0) == (ha > 0.0)) {
        a = mid;
        ha = *hm;
      } else {
        b = mid;
      }
    }
    record(pattern, 0.5 * (a + b));
  };

  // Continuous roots of h(S) = Σσ_i(S) − S on [n·lo, n·hi], one branch pattern at a time.
  const double s_lo = static_cast<double>(n) * bounds.lo;
  const double s_hi = static_cast<double>(n) * bounds.hi;
  if (s_hi - s_lo <= 0.0) {
    for (const auto& p : patterns_at(s_lo)) record(p, s_lo);
  } else {
    // Uniform grid plus the totals where some branch appears or vanishes, so
    // that patterns alive only on a narrow window are still sampled.
    std::vector<double> grid;
    for (int k = 0; k < kScanGridPoints; ++k) {
      grid.push_back((k == kScanGridPoints - 1) ? s_hi : s_lo + (s_hi - s_lo) * k / (kScanGridPoints - 1));
    }
    for (const auto& c : members) {
      std::vector<double> edges{ratio_2c_over_cprime(c, bounds.lo), ratio_2c_over_cprime(c, bounds.hi)};
      if (const auto* f = std::get_if<AffineQuadratic>(&c.family)) {
        const double sq = 4.0 * f->a0 / f->a2 - (f->a1 / f->a2) * (f->a1 / f->a2);
        if (sq > 0.0) edges.push_back(std::sqrt(sq));
      }
      for (double e : edges) {
        const double delta = 1e-9 * std::max(1.0, e);
        for (double x : {e - delta, e, e + delta}) {
          if (x > s_lo && x < s_hi) grid.push_back(x);
        }
      }
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    std::map<Pattern, std::pair<double, double>> previous;
    for (double s : grid) {
      std::map<Pattern, std::pair<double, double>> current;
      for (const auto& p : patterns_at(s)) {
        const auto hs = residual_for(p, s);
        if (!hs) continue;
        current.emplace(p, std::make_pair(s, *hs));
        if (accept(*hs, s)) {
          record(p, s);
          continue;
        }
        const auto it = previous.find(p);
        if (it == previous.end()) continue;
        const auto [prev_s, prev_h] = it->second;
        if (!accept(prev_h, prev_s) && ((prev_h > 0.0) != (*hs > 0.0))) bisect_pattern(p, prev_s, prev_h, s);
      }
      previous = std::move(current);
    }
  }

  // Constant-ratio classes: at S = 2/rate every member of the class is
  // indifferent; they split the remaining scope equally.
  std::vector<double> rates;
  for (const auto& c : members) {
    if (const auto* e = std::get_if<ScaledExponential>(&c.family)) {
      if (std::none_of(rates.begin(), rates.end(), [&](double r) { return same_rate(r, e->rate); })) {
        rates.push_back(e->rate);
      }
    }
  }
  for (double rate : rates) {
    const double target = 2.0 / rate;
    std::vector<double> per(n);
    std::vector<std::size_t> group;
    double others = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const auto* e = std::get_if<ScaledExponential>(&members[k].family);
      if (e && same_rate(e->rate, rate)) {
        group.push_back(k);
      } else {
        per[k] = smallest_response(members[k], target, bounds);
        others += per[k];
      }
    }
    const double share = (target - others) / static_cast<double>(group.size());
    const double slack = 1e-12 * std::max(1.0, bounds.hi);
    if (share < bounds.lo - slack || share > bounds.hi + slack) continue;
    for (std::size_t k : group) per[k] = std::clamp(share, bounds.lo, bounds.hi);
    found.push_back({target, std::move(per), true});
  }

  if (found.empty()) {
    std::ostringstream msg;
    msg << "no consistent equilibrium scope profile for alliance " << alliance.label() << " on total-scope bracket ["
        << s_lo << ", " << s_hi << "]";
    throw SolverError(msg.str());
  }

  std::sort(found.begin(), found.end(), [](const Candidate& a, const Candidate& b) { return a.total < b.total; });
  // Merge candidates that describe the same total.
  std::vector<Candidate> distinct;
  for (auto& c : found) {
    if (!distinct.empty() && std::abs(c.total - distinct.back().total) <= 1e-9 * std::max(1.0, c.total)) {
      if (c.degenerate && !distinct.back().degenerate) distinct.back() = std::move(c);
      continue;
    }
    distinct.push_back(std::move(c));
  }

  ScopeProfile profile = make_profile(alliance, distinct.front().per_agent);
  profile.degenerate = distinct.front().degenerate;
  bool interior = true;
  for (std::size_t k = 0; k < n; ++k) {
    const double r = ratio_2c_over_cprime(members[k], profile.per_agent[k]);
    if (std::abs(r - profile.total) > 1e-9 * std::max(1.0, profile.total)) interior = false;
  }
  profile.interior = interior;
  for (std::size_t i = 1; i < distinct.size(); ++i) profile.alternative_totals.push_back(distinct[i].total);
  if (!profile.alternative_totals.empty()) {
    profile.warnings.push_back("multiple equilibrium scope profiles for " + alliance.label() +
                               "; selected the smallest total, other totals: " +
                               format_totals(profile.alternative_totals));
  }
  return profile;
}

ScopeProfile solve_planner_scopes(const Alliance& alliance, std::span<const CostSpec> costs,
                                  const ScopeBounds& bounds) {
  require_members(alliance, costs);
  std::vector<CostSpec> members;
  for (AgentId a : alliance) members.push_back(costs[a]);
  require_valid(members, bounds);

  const std::size_t n = alliance.size();
  auto scopes_at = [&](double lambda) {
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
      out[k] = std::clamp(inverse_marginal(members[k], lambda), bounds.lo, bounds.hi);
    }
    return out;
  };
  auto residual = [&](double lambda) {
    double cost = 0.0, total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double s = std::clamp(inverse_marginal(members[k], lambda), bounds.lo, bounds.hi);
      cost += eval_cost(members[k], s);
      total += s;
    }
    return 2.0 * cost - lambda * total;
  };

  double lam_min = std::numeric_limits<double>::infinity();
  double lam_max = 0.0;
  double cost_lo = 0.0, cost_hi = 0.0;
  for (const auto& c : members) {
    const double at_lo = eval_dcost(c, bounds.lo);
    const double at_hi = eval_dcost(c, bounds.hi);
    lam_min = std::min(lam_min, at_lo);
    lam_max = std::max(lam_max, at_hi);
    cost_lo += eval_cost(c, bounds.lo);
    cost_hi += eval_cost(c, bounds.hi);
  }
  lam_min = std::min(lam_min, 2.0 * cost_lo / (static_cast<double>(n) * bounds.lo)) * 0.5;
  lam_max = std::max(lam_max, 2.0 * cost_hi / (static_cast<double>(n) * bounds.hi)) * 2.0;

  const double log_lo = std::log(lam_min);
  const double log_hi = std::log(lam_max);
  std::vector<double> roots;
  auto accept = [&](double lambda) {
    double cost = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      cost += eval_cost(members[k], std::clamp(inverse_marginal(members[k], lambda), bounds.lo, bounds.hi));
    }
    return std::abs(residual(lambda)) <= 1e-9 * std::max(1.0, 2.0 * cost);
  };
  double prev_l = lam_min;
  double prev_g = residual(prev_l);
  for (int k = 1; k < kScanGridPoints; ++k) {
    const double l = std::exp(log_lo + (log_hi - log_lo) * k / (kScanGridPoints - 1));
    const double g = residual(l);
    if (g == 0.0) {
      roots.push_back(l);
    } else if (prev_g != 0.0 && ((prev_g > 0.0) != (g > 0.0))) {
      const double root = bisect(residual, prev_l, l);
      if (accept(root)) roots.push_back(root);
    }
    prev_l = l;
    prev_g = g;
  }
  if (roots.empty()) {
    std::ostringstream msg;
    msg << "no planner scope profile for alliance " << alliance.label() << ": no root of 2*sum(c) - lambda*S on ["
        << lam_min << ", " << lam_max << "]";
    throw SolverError(msg.str());
  }

  // Among stationary profiles keep the one with the lowest cost per speed.
  std::optional<ScopeProfile> best;
  double best_value = std::numeric_limits<double>::infinity();
  std::vector<double> totals;
  for (double lambda : roots) {
    ScopeProfile p = make_profile(alliance, scopes_at(lambda));
    totals.push_back(p.total);
    const double v = cost_per_speed(p, costs);
    if (v < best_value) {
      best_value = v;
      best = std::move(p);
    }
  }
  ScopeProfile profile = std::move(*best);
  const double implied = 2.0 * total_cost_rate(profile, costs) / profile.total;
  bool interior = true;
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(eval_dcost(members[k], profile.per_agent[k]) - implied) > 1e-9 * std::max(1.0, implied)) {
      interior = false;
    }
  }
  profile.interior = interior;
  for (double t : totals) {
    if (std::abs(t - profile.total) > 1e-9 * std::max(1.0, t)) profile.alternative_totals.push_back(t);
  }
  if (!profile.alternative_totals.empty()) {
    profile.warnings.push_back("multiple planner stationary profiles for " + alliance.label() +
                               "; selected the lowest cost per speed, other totals: " +
                               format_totals(profile.alternative_totals));
  }
  return profile;
}

std::size_t interior_capacity(const CostSpec& cost, const ScopeBounds& bounds, std::size_t max_team) {
  std::size_t best = 0;
  for (std::size_t n = 1; n <= max_team; ++n) {
    const std::vector<CostSpec> team(n, cost);
    const auto profile = solve_equilibrium_scopes(Alliance::full_team(n), team, bounds);
    if (!profile.interior) break;
    best = n;
  }
  return best;
}

}  // namespace exitwaves
