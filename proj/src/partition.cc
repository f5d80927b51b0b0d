#include "sale/partition.h"

#include <algorithm>
#include <stdexcept>

namespace sale {

std::vector<int> TreePartition::leaders() const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i) {
    if (is_leader(i)) out.push_back(i);
  }
  return out;
}

int TreePartition::root(int i) const {
  int steps = 0;
  while (parent.at(i) != kNoParent) {
    i = parent[i];
    if (++steps > size()) throw std::logic_error("parent cycle in partition");
  }
  return i;
}

std::vector<int> TreePartition::roots() const {
  std::vector<int> out(size());
  for (int i = 0; i < size(); ++i) out[i] = root(i);
  return out;
}

namespace {

int Depth(const TreePartition& p, int i) {
  int depth = 0;
  while (p.parent[i] != kNoParent) {
    i = p.parent[i];
    if (++depth > p.size()) throw std::logic_error("parent cycle in partition");
  }
  return depth;
}

}  // namespace

int TreePartition::height(int leader) const {
  if (!is_leader(leader)) throw std::invalid_argument("height() needs a leader");
  int best = 0;
  for (int i = 0; i < size(); ++i) {
    if (root(i) == leader) best = std::max(best, Depth(*this, i));
  }
  return best;
}

int TreePartition::max_height() const {
  int best = 0;
  for (int i = 0; i < size(); ++i) best = std::max(best, Depth(*this, i));
  return best;
}

void TreePartition::Validate(const InterferenceGraph& g) const {
  if (size() != g.size()) throw std::logic_error("partition size mismatch");
  for (int i = 0; i < size(); ++i) {
    const int p = parent[i];
    if (p == kNoParent) continue;
    if (p < 0 || p >= size()) throw std::logic_error("parent index out of range");
    if (!g.adjacent(i, p)) {
      throw std::logic_error("parent of user " + std::to_string(i + 1) +
                             " is not a neighbor");
    }
  }
  for (int i = 0; i < size(); ++i) root(i);
}

std::vector<int> TreePartition::RepairCycles() {
  std::vector<int> promoted;
  // 0 = unvisited, 1 = on current walk, 2 = known to reach a leader.
  std::vector<char> state(size(), 0);
  for (int start = 0; start < size(); ++start) {
    std::vector<int> walk;
    int i = start;
    while (i != kNoParent && state[i] == 0) {
      state[i] = 1;
      walk.push_back(i);
      i = parent[i];
    }
    if (i != kNoParent && state[i] == 1) {
      auto begin = std::find(walk.begin(), walk.end(), i);
      const int smallest = *std::min_element(begin, walk.end());
      parent[smallest] = kNoParent;
      promoted.push_back(smallest);
    }
    for (int w : walk) state[w] = 2;
  }
  return promoted;
}

}  // namespace sale
