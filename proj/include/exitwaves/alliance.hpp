#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace exitwaves {

using AgentId = std::size_t;

/// A set of agents (0-based indices) kept sorted and unique.
class Alliance {
 public:
  Alliance() = default;
  Alliance(std::initializer_list<AgentId> members);
  explicit Alliance(std::vector<AgentId> members);

  /// {0, 1, ..., n-1}
  static Alliance full_team(std::size_t n);
  static Alliance from_mask(std::uint64_t mask);

  [[nodiscard]] const std::vector<AgentId>& members() const noexcept { return members_; }
  [[nodiscard]] std::size_t size() const noexcept { return members_.size(); }
  [[nodiscard]] bool empty() const noexcept { return members_.empty(); }
  [[nodiscard]] bool contains(AgentId agent) const noexcept;
  [[nodiscard]] bool is_strict_subset_of(const Alliance& other) const noexcept;
  [[nodiscard]] std::uint64_t mask() const;

  [[nodiscard]] Alliance without(const Alliance& removed) const;
  [[nodiscard]] Alliance united(const Alliance& other) const;

  /// 1-based rendering, e.g. "{1,2,3}"; the empty alliance renders as "{}".
  [[nodiscard]] std::string label() const;

  auto begin() const noexcept { return members_.begin(); }
  auto end() const noexcept { return members_.end(); }
  AgentId operator[](std::size_t i) const { return members_[i]; }

  friend bool operator==(const Alliance&, const Alliance&) = default;
  friend auto operator<=>(const Alliance&, const Alliance&) = default;

 private:
  std::vector<AgentId> members_;
};

/// Renders an ordered partition as consecutive blocks, e.g. "{1,2}{3}".
std::string partition_label(const std::vector<Alliance>& blocks, const std::string& separator = "");

}  // namespace exitwaves
