#include "exitwaves/alliance.hpp"

#include <algorithm>
#include <iterator>

#include "exitwaves/errors.hpp"

namespace exitwaves {

Alliance::Alliance(std::initializer_list<AgentId> members) : Alliance(std::vector<AgentId>(members)) {}

Alliance::Alliance(std::vector<AgentId> members) : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

Alliance Alliance::full_team(std::size_t n) {
  std::vector<AgentId> m(n);
  for (std::size_t i = 0; i < n; ++i) m[i] = i;
  return Alliance(std::move(m));
}

Alliance Alliance::from_mask(std::uint64_t mask) {
  std::vector<AgentId> m;
  for (AgentId i = 0; i < 64; ++i) {
    if (mask & (std::uint64_t{1} << i)) m.push_back(i);
  }
  return Alliance(std::move(m));
}

bool Alliance::contains(AgentId agent) const noexcept {
  return std::binary_search(members_.begin(), members_.end(), agent);
}

bool Alliance::is_strict_subset_of(const Alliance& other) const noexcept {
  return size() < other.size() &&
         std::includes(other.members_.begin(), other.members_.end(), members_.begin(), members_.end());
}

std::uint64_t Alliance::mask() const {
  std::uint64_t m = 0;
  for (AgentId a : members_) {
    if (a >= 64) throw ValidationError("alliance mask supports at most 64 agents");
    m |= std::uint64_t{1} << a;
  }
  return m;
}

Alliance Alliance::without(const Alliance& removed) const {
  std::vector<AgentId> out;
  std::set_difference(members_.begin(), members_.end(), removed.members_.begin(), removed.members_.end(),
                      std::back_inserter(out));
  return Alliance(std::move(out));
}

Alliance Alliance::united(const Alliance& other) const {
  std::vector<AgentId> out;
  std::set_union(members_.begin(), members_.end(), other.members_.begin(), other.members_.end(),
                 std::back_inserter(out));
  return Alliance(std::move(out));
}

std::string Alliance::label() const {
  std::string s = "{";
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(members_[i] + 1);
  }
  s += '}';
  return s;
}

std::string partition_label(const std::vector<Alliance>& blocks, const std::string& separator) {
  std::string s;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (i) s += separator;
    s += blocks[i].label();
  }
  return s;
}

}  // namespace exitwaves
