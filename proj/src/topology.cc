#include "sale/topology.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <queue>
#include <random>
#include <sstream>

namespace sale {

bool InterferenceGraph::adjacent(int i, int j) const {
  const auto& nbrs = adjacency_.at(i);
  return std::binary_search(nbrs.begin(), nbrs.end(), j);
}

int InterferenceGraph::max_degree() const {
  int best = 0;
  for (const auto& nbrs : adjacency_) {
    best = std::max(best, static_cast<int>(nbrs.size()));
  }
  return best;
}

std::size_t InterferenceGraph::edge_count() const {
  std::size_t twice = 0;
  for (const auto& nbrs : adjacency_) twice += nbrs.size();
  return twice / 2;
}

std::vector<Edge> InterferenceGraph::edges() const {
  std::vector<Edge> out;
  for (int i = 0; i < size(); ++i) {
    for (int j : adjacency_[i]) {
      if (i < j) out.push_back({i + 1, j + 1});
    }
  }
  return out;
}

void InterferenceGraph::CheckInvariants() const {
  for (int i = 0; i < size(); ++i) {
    const auto& nbrs = adjacency_[i];
    if (!std::is_sorted(nbrs.begin(), nbrs.end()) ||
        std::adjacent_find(nbrs.begin(), nbrs.end()) != nbrs.end()) {
      throw std::logic_error("adjacency list not strictly sorted");
    }
    for (int j : nbrs) {
      if (j == i) throw std::logic_error("nonzero diagonal in interference matrix");
      if (!adjacent(j, i)) throw std::logic_error("interference matrix not symmetric");
    }
  }
}

InterferenceGraph BuildGraph(int n, std::span<const Edge> edges) {
  if (n < 0) throw std::invalid_argument("user count must be nonnegative");
  InterferenceGraph g;
  g.adjacency_.assign(n, {});
  for (const Edge& e : edges) {
    if (e.u < 1 || e.u > n || e.v < 1 || e.v > n) {
      throw std::invalid_argument("edge (" + std::to_string(e.u) + "," +
                                  std::to_string(e.v) + ") out of range 1.." +
                                  std::to_string(n));
    }
    if (e.u == e.v) {
      throw std::invalid_argument("self-loop at user " + std::to_string(e.u));
    }
    g.adjacency_[e.u - 1].push_back(e.v - 1);
    g.adjacency_[e.v - 1].push_back(e.u - 1);
  }
  for (auto& nbrs : g.adjacency_) {
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
  }
  g.CheckInvariants();
  return g;
}

InterferenceGraph RandomGeometric(int n, double area, double range,
                                  std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("random_geometric needs n >= 1");
  if (!(area > 0.0) || !(range > 0.0)) {
    throw std::invalid_argument("area and range must be positive");
  }
  const double side = std::sqrt(area);
  const double range2 = range * range;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(0.0, side);

  InterferenceGraph g;
  for (int attempt = 0; attempt < kMaxGenerationAttempts; ++attempt) {
    g.positions_.resize(n);
    for (auto& p : g.positions_) {
      p.x = coord(rng);
      p.y = coord(rng);
    }
    g.adjacency_.assign(n, {});
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double dx = g.positions_[i].x - g.positions_[j].x;
        const double dy = g.positions_[i].y - g.positions_[j].y;
        if (dx * dx + dy * dy <= range2) {
          g.adjacency_[i].push_back(j);
          g.adjacency_[j].push_back(i);
        }
      }
    }
    for (auto& nbrs : g.adjacency_) std::sort(nbrs.begin(), nbrs.end());
    if (IsConnected(g)) {
      g.CheckInvariants();
      return g;
    }
  }
  throw GenerationError("no connected topology after " +
                        std::to_string(kMaxGenerationAttempts) + " attempts");
}

bool IsConnected(const InterferenceGraph& g) {
  const int n = g.size();
  if (n == 0) return true;
  std::vector<char> seen(n, 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int v : g.neighbors(u)) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        frontier.push(v);
      }
    }
  }
  return reached == n;
}

InterferenceGraph CompleteGraph(int n) {
  std::vector<Edge> edges;
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) edges.push_back({i, j});
  }
  return BuildGraph(n, edges);
}

InterferenceGraph RingGraph(int n) {
  if (n < 3) throw std::invalid_argument("ring needs at least 3 users");
  std::vector<Edge> edges;
  for (int i = 1; i <= n; ++i) edges.push_back({i, i % n + 1});
  return BuildGraph(n, edges);
}

namespace {

// Nine users, trees rooted at 1 (height 2, path 6->2->1) and 7 (height 1).
// User 5 of tree 1 is the only cross-tree neighbor of leader 7.
constexpr Edge kNineUserEdges[] = {{1, 2}, {1, 3}, {1, 4}, {1, 5}, {2, 3},
                                   {2, 4}, {2, 6}, {5, 7}, {7, 8}, {7, 9},
                                   {8, 9}};

}  // namespace

InterferenceGraph BuiltinTopology(std::string_view name) {
  if (name == "fig1") return BuildGraph(3, {{1, 2}, {2, 3}});
  if (name == "fig3") return BuildGraph(9, kNineUserEdges);
  if (name == "fig5") {
    std::vector<Edge> edges(std::begin(kNineUserEdges), std::end(kNineUserEdges));
    edges.push_back({8, 10});
    return BuildGraph(10, edges);
  }
  throw std::invalid_argument("unknown builtin topology '" + std::string(name) + "'");
}

std::vector<std::string> BuiltinTopologyNames() { return {"fig1", "fig3", "fig5"}; }

std::string SerializeTopology(const InterferenceGraph& g) {
  std::ostringstream out;
  out << "n=" << g.size() << "\n";
  if (g.has_positions()) {
    out << std::setprecision(17);
    for (int i = 0; i < g.size(); ++i) {
      out << "# pos " << i + 1 << " " << g.positions()[i].x << " "
          << g.positions()[i].y << "\n";
    }
  }
  for (const Edge& e : g.edges()) out << e.u << " " << e.v << "\n";
  return out.str();
}

namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

int ParseInt(std::string_view token, int line) {
  int value = 0;
  std::size_t used = 0;
  try {
    value = std::stoi(std::string(token), &used);
  } catch (const std::exception&) {
    throw ParseError(line, "expected integer, got '" + std::string(token) + "'");
  }
  if (used != token.size()) {
    throw ParseError(line, "expected integer, got '" + std::string(token) + "'");
  }
  return value;
}

}  // namespace

InterferenceGraph ParseTopology(std::istream& in) {
  std::string raw;
  int line_no = 0;
  int n = -1;
  std::vector<Edge> edges;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line(raw);
    if (auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    if (n < 0) {
      if (line.substr(0, 2) != "n=") {
        throw ParseError(line_no, "expected header 'n=<N>'");
      }
      n = ParseInt(Trim(line.substr(2)), line_no);
      if (n < 1) throw ParseError(line_no, "user count must be positive");
      continue;
    }
    std::istringstream fields{std::string(line)};
    std::string a, b, extra;
    if (!(fields >> a >> b) || (fields >> extra)) {
      throw ParseError(line_no, "expected '<i> <j>'");
    }
    Edge e{ParseInt(a, line_no), ParseInt(b, line_no)};
    if (e.u < 1 || e.u > n || e.v < 1 || e.v > n) {
      throw ParseError(line_no, "user index out of range 1.." + std::to_string(n));
    }
    if (e.u == e.v) throw ParseError(line_no, "self-loop");
    edges.push_back(e);
  }
  if (n < 0) throw ParseError(line_no, "missing header 'n=<N>'");
  return BuildGraph(n, edges);
}

InterferenceGraph ParseTopology(std::string_view text) {
  std::istringstream in{std::string(text)};
  return ParseTopology(in);
}

InterferenceGraph ReadTopologyFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open topology file '" + path + "'");
  return ParseTopology(in);
}

void WriteTopologyFile(const InterferenceGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write topology file '" + path + "'");
  out << SerializeTopology(g);
}

}  // namespace sale
