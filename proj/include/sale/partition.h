#pragma once

#include <vector>

#include "sale/topology.h"

namespace sale {

inline constexpr int kNoParent = -1;

// Forest produced by leader election: every follower points at a graph
// neighbor, every parent chain ends at a leader (a user with no parent).
struct TreePartition {
  std::vector<int> parent;  // 0-based; kNoParent for leaders

  int size() const { return static_cast<int>(parent.size()); }
  bool is_leader(int i) const { return parent.at(i) == kNoParent; }
  std::vector<int> leaders() const;

  // Leader at the end of i's parent chain.
  int root(int i) const;
  std::vector<int> roots() const;

  // Longest root-to-leaf path (in hops) of the tree led by `leader`.
  int height(int leader) const;
  int max_height() const;

  // Throws std::logic_error when the forest invariants do not hold for g.
  void Validate(const InterferenceGraph& g) const;

  // Breaks every parent cycle by promoting its smallest-ID member to leader.
  // Returns the promoted users.
  std::vector<int> RepairCycles();
};

}  // namespace sale
