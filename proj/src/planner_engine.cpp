#include "exitwaves/planner_engine.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "exitwaves/errors.hpp"
#include "exitwaves/welfare_eval.hpp"

namespace exitwaves {

PlannerProfileCache::PlannerProfileCache(std::span<const CostSpec> costs, const ScopeBounds& bounds)
    : costs_(costs), bounds_(bounds) {}

const ScopeProfile& PlannerProfileCache::profile(const Alliance& alliance) {
  const std::uint64_t key = alliance.mask();
  auto it = profiles_.find(key);
  if (it == profiles_.end()) it = profiles_.emplace(key, solve_planner_scopes(alliance, costs_, bounds_)).first;
  return it->second;
}

double PlannerProfileCache::cost_per_speed(const Alliance& alliance) {
  if (alliance.empty()) return 0.0;
  return exitwaves::cost_per_speed(profile(alliance), costs_);
}

double planner_drawdown(const Alliance& current, const Alliance& successor, PlannerProfileCache& cache) {
  if (current.empty()) throw ValidationError("planner drawdown needs a non-empty alliance");
  if (!successor.is_strict_subset_of(current)) {
    throw ValidationError(successor.label() + " is not a strict subset of " + current.label());
  }
  const double leaving = static_cast<double>(current.size() - successor.size());
  const double gap = cache.cost_per_speed(current) - cache.cost_per_speed(successor);
  if (gap == 0.0) return std::numeric_limits<double>::infinity();
  return leaving / (2.0 * gap);
}

double planner_drawdown(const Alliance& current, const Alliance& successor, std::span<const CostSpec> costs,
                        const ScopeBounds& bounds) {
  PlannerProfileCache cache(costs, bounds);
  return planner_drawdown(current, successor, cache);
}

AllianceChain build_chain(const std::vector<Alliance>& alliances, PlannerProfileCache& cache) {
  if (alliances.empty()) throw ValidationError("empty alliance chain");
  AllianceChain chain;
  chain.alliances = alliances;
  chain.feasible = true;
  double previous = 0.0;
  for (std::size_t k = 0; k < alliances.size(); ++k) {
    const Alliance next = k + 1 < alliances.size() ? alliances[k + 1] : Alliance{};
    chain.scopes.push_back(cache.profile(alliances[k]));
    const double d = planner_drawdown(alliances[k], next, cache);
    chain.drawdowns.push_back(d);
    if (!std::isfinite(d) || !(d > previous)) chain.feasible = false;
    previous = d;
  }
  return chain;
}

AllianceChain build_chain(const std::vector<Alliance>& alliances, std::span<const CostSpec> costs,
                          const ScopeBounds& bounds) {
  PlannerProfileCache cache(costs, bounds);
  return build_chain(alliances, cache);
}

bool team_well_ordered(const Alliance& team, std::span<const CostSpec> costs) {
  std::vector<CostSpec> members;
  for (AgentId a : team) members.push_back(costs[a]);
  return well_ordered(members);
}

namespace {

Alliance suffix(const Alliance& team, std::size_t from) {
  return Alliance(std::vector<AgentId>(team.begin() + static_cast<std::ptrdiff_t>(from), team.end()));
}

}  // namespace

GreedyResult greedy_wellordered_sequence(const Alliance& team, std::span<const CostSpec> costs,
                                         const ScopeBounds& bounds) {
  if (team.empty()) throw ValidationError("greedy sequence needs a non-empty team");
  if (!team_well_ordered(team, costs)) {
    throw ValidationError("greedy sequence requires proportional costs with strictly increasing multipliers");
  }
  PlannerProfileCache cache(costs, bounds);
  GreedyResult result;
  const std::size_t n = team.size();
  std::size_t upper = n;
  while (upper > 0) {
    const Alliance successor = suffix(team, upper);
    std::size_t best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    std::vector<double> values(upper);
    for (std::size_t k = 0; k < upper; ++k) {
      values[k] = planner_drawdown(suffix(team, k), successor, cache);
      if (values[k] > best_value) {
        best_value = values[k];
        best = k;
      }
    }
    for (std::size_t k = 0; k < upper; ++k) {
      if (k != best && std::abs(values[k] - best_value) <= kArgmaxTolerance * std::max(1.0, std::abs(best_value))) {
        std::ostringstream msg;
        msg << "greedy argmax is not unique: suffixes starting at agents " << (team[k] + 1) << " and "
            << (team[best] + 1) << " both give drawdown " << best_value
            << " (the maximiser is unique for well-ordered costs)";
        throw SolverError(msg.str());
      }
    }
    result.picks.push_back(best);
    upper = best;
  }
  std::vector<Alliance> alliances;
  for (auto it = result.picks.rbegin(); it != result.picks.rend(); ++it) alliances.push_back(suffix(team, *it));
  result.chain = build_chain(alliances, cache);
  return result;
}

namespace {

void extend_general(const Alliance& current, std::vector<Alliance>& prefix, std::vector<std::vector<Alliance>>& out) {
  out.push_back(prefix);
  const std::size_t m = current.size();
  if (m < 2) return;
  // Every non-empty proper subset of `current`, largest masks first.
  const std::uint64_t full = (std::uint64_t{1} << m) - 1;
  for (std::uint64_t bits = full - 1; bits >= 1; --bits) {
    std::vector<AgentId> members;
    for (std::size_t j = 0; j < m; ++j) {
      if (bits & (std::uint64_t{1} << j)) members.push_back(current[j]);
    }
    prefix.emplace_back(std::move(members));
    extend_general(prefix.back(), prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<std::vector<Alliance>> enumerate_chains(const Alliance& team, bool suffix_only, std::size_t cap) {
  if (team.empty()) throw ValidationError("cannot enumerate chains of an empty team");
  if (cap == 0) cap = suffix_only ? kSuffixChainCap : kGeneralChainCap;
  if (team.size() > cap) {
    std::ostringstream msg;
    msg << "team of " << team.size() << " exceeds the enumeration cap of " << cap;
    throw ValidationError(msg.str());
  }
  std::vector<std::vector<Alliance>> out;
  if (suffix_only) {
    const std::size_t breaks = team.size() - 1;
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << breaks); ++bits) {
      std::vector<Alliance> chain{team};
      for (std::size_t j = 0; j < breaks; ++j) {
        if (bits & (std::uint64_t{1} << j)) chain.push_back(suffix(team, j + 1));
      }
      out.push_back(std::move(chain));
    }
    return out;
  }
  std::vector<Alliance> prefix{team};
  extend_general(team, prefix, out);
  return out;
}

BruteForceResult brute_force_optimal_sequence(const Alliance& team, std::span<const CostSpec> costs,
                                              const ScopeBounds& bounds, ChainSearch search) {
  bool suffix_only = search == ChainSearch::suffix;
  if (search == ChainSearch::automatic) suffix_only = team_well_ordered(team, costs);
  const auto skeletons = enumerate_chains(team, suffix_only);
  PlannerProfileCache cache(costs, bounds);
  BruteForceResult result;
  result.chains_total = skeletons.size();
  bool found = false;
  for (const auto& skeleton : skeletons) {
    AllianceChain chain = build_chain(skeleton, cache);
    if (!chain.feasible) continue;
    ++result.chains_feasible;
    WelfareReport welfare = chain_welfare(chain, costs);
    if (!found || welfare.total > result.welfare.total) {
      result.chain = std::move(chain);
      result.welfare = std::move(welfare);
      found = true;
    }
  }
  if (!found) throw SolverError("no feasible alliance chain for " + team.label());
  return result;
}

}  // namespace exitwaves
