#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sale {

// Unordered pair of user IDs. External interfaces (files, CLI, edge lists
// handed to BuildGraph) use 1-based IDs; everything indexed inside the
// library is 0-based.
struct Edge {
  int u = 0;
  int v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Symmetric interference relation over N users (Tx-Rx pairs). a_ij = 1 means
// a transmission by j collides with one by i. Immutable after construction.
class InterferenceGraph {
 public:
  InterferenceGraph() = default;

  int size() const { return static_cast<int>(adjacency_.size()); }
  std::span<const int> neighbors(int i) const { return adjacency_.at(i); }
  int degree(int i) const { return static_cast<int>(adjacency_.at(i).size()); }
  bool adjacent(int i, int j) const;
  int max_degree() const;
  std::size_t edge_count() const;

  // Edge list with 1-based IDs, u < v, sorted.
  std::vector<Edge> edges() const;

  bool has_positions() const { return !positions_.empty(); }
  const std::vector<Point>& positions() const { return positions_; }

 private:
  friend InterferenceGraph BuildGraph(int n, std::span<const Edge> edges);
  friend InterferenceGraph RandomGeometric(int n, double area, double range,
                                           std::uint64_t seed);

  void CheckInvariants() const;

  std::vector<std::vector<int>> adjacency_;  // sorted neighbor lists
  std::vector<Point> positions_;
};

// Builds a graph from 1-based unordered pairs. Duplicate pairs are merged;
// out-of-range indices and self-loops throw std::invalid_argument.
InterferenceGraph BuildGraph(int n, std::span<const Edge> edges);
inline InterferenceGraph BuildGraph(int n, std::initializer_list<Edge> edges) {
  return BuildGraph(n, std::span<const Edge>(edges.begin(), edges.size()));
}

// Places n users uniformly in a sqrt(area) x sqrt(area) square and connects
// every pair within `range`. Regenerates until the graph is connected, up to
// kMaxGenerationAttempts draws.
inline constexpr int kMaxGenerationAttempts = 10000;
InterferenceGraph RandomGeometric(int n, double area, double range,
                                  std::uint64_t seed);

bool IsConnected(const InterferenceGraph& g);

InterferenceGraph CompleteGraph(int n);
// Cycle 1-2-...-n-1.
InterferenceGraph RingGraph(int n);

// The three-user chain, the nine-user two-tree example and the ten-user
// handover example. Names: "fig1", "fig3", "fig5".
InterferenceGraph BuiltinTopology(std::string_view name);
std::vector<std::string> BuiltinTopologyNames();

// Plain-text topology format:
//   n=<N>
//   <i> <j>        one edge per line, 1-based
// '#' starts a comment; blank lines are ignored.
std::string SerializeTopology(const InterferenceGraph& g);
InterferenceGraph ParseTopology(std::istream& in);
InterferenceGraph ParseTopology(std::string_view text);
InterferenceGraph ReadTopologyFile(const std::string& path);
void WriteTopologyFile(const InterferenceGraph& g, const std::string& path);

}  // namespace sale
