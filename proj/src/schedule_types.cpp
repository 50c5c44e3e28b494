#include "exitwaves/schedule_types.hpp"

#include <sstream>

#include "exitwaves/errors.hpp"

namespace exitwaves {

std::size_t ExitSchedule::wave_of(AgentId agent) const {
  for (std::size_t k = 0; k < waves.size(); ++k) {
    if (waves[k].exiting.contains(agent)) return k;
  }
  std::ostringstream msg;
  msg << "agent " << (agent + 1) << " does not exit in this schedule";
  throw ValidationError(msg.str());
}

std::vector<Alliance> ExitSchedule::partition() const {
  std::vector<Alliance> blocks;
  for (const auto& w : waves) blocks.push_back(w.exiting);
  return blocks;
}

std::string ExitSchedule::label(const std::string& separator) const { return partition_label(partition(), separator); }

std::vector<Alliance> AllianceChain::partition() const {
  std::vector<Alliance> blocks;
  for (std::size_t k = 0; k < alliances.size(); ++k) {
    blocks.push_back(k + 1 < alliances.size() ? alliances[k].without(alliances[k + 1]) : alliances[k]);
  }
  return blocks;
}

std::string AllianceChain::label(const std::string& separator) const {
  return partition_label(partition(), separator);
}

PhasePlan to_plan(const ExitSchedule& schedule, std::size_t team_size) {
  PhasePlan plan;
  plan.team_size = team_size;
  for (const auto& w : schedule.waves) {
    Phase p;
    p.active = w.active;
    p.scopes = w.scopes;
    p.stop_gap = w.trigger;
    p.exiting = w.exiting;
    plan.phases.push_back(std::move(p));
  }
  return plan;
}

PhasePlan to_plan(const AllianceChain& chain, std::size_t team_size) {
  if (chain.scopes.size() != chain.alliances.size() || chain.drawdowns.size() != chain.alliances.size()) {
    throw ValidationError("alliance chain is missing scopes or drawdowns");
  }
  PhasePlan plan;
  plan.team_size = team_size;
  const auto blocks = chain.partition();
  for (std::size_t k = 0; k < chain.alliances.size(); ++k) {
    Phase p;
    p.active = chain.alliances[k];
    p.scopes = chain.scopes[k];
    p.stop_gap = chain.drawdowns[k];
    p.exiting = blocks[k];
    plan.phases.push_back(std::move(p));
  }
  return plan;
}

}  // namespace exitwaves
