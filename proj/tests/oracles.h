#pragma once

// Brute-force reference implementations used only by the tests. They share
// no code with the library: dense matrices, explicit loops, cofactor
// expansion.

#include <cmath>
#include <functional>
#include <queue>
#include <random>
#include <utility>
#include <vector>

#include "sale/topology.h"

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

inline std::vector<std::vector<int>> Dense(int n, const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::vector<int>> a(n, std::vector<int>(n, 0));
  for (auto [u, v] : edges) a[u - 1][v - 1] = a[v - 1][u - 1] = 1;
  return a;
}

inline std::vector<std::vector<int>> Dense(const sale::InterferenceGraph& g) {
  std::vector<std::vector<int>> a(g.size(), std::vector<int>(g.size(), 0));
  for (auto e : g.edges()) a[e.u - 1][e.v - 1] = a[e.v - 1][e.u - 1] = 1;
  return a;
}

inline std::vector<double> Throughput(const std::vector<std::vector<int>>& a,
                                      const std::vector<double>& q) {
  const int n = static_cast<int>(a.size());
  std::vector<double> th(n);
  for (int i = 0; i < n; ++i) {
    double p = q[i];
    for (int j = 0; j < n; ++j) {
      if (a[i][j]) p *= 1.0 - q[j];
    }
    th[i] = p;
  }
  return th;
}

inline double Rim(const std::vector<std::vector<int>>& a, const std::vector<double>& q, int i) {
  double r = 0.0;
  for (int j = 0; j < static_cast<int>(a.size()); ++j) {
    if (j == i) continue;
    r += a[i][j] * q[i] / (1.0 - q[j]) + a[j][i] * q[j] / (1.0 - q[i]);
  }
  return r;
}

// Laplace expansion along the first row.
inline double Det(const Matrix& m) {
  const int n = static_cast<int>(m.size());
  if (n == 0) return 1.0;
  if (n == 1) return m[0][0];
  double det = 0.0;
  for (int c = 0; c < n; ++c) {
    if (m[0][c] == 0.0) continue;
    Matrix minor;
    for (int r = 1; r < n; ++r) {
      std::vector<double> row;
      for (int k = 0; k < n; ++k) {
        if (k != c) row.push_back(m[r][k]);
      }
      minor.push_back(row);
    }
    det += ((c % 2) ? -1.0 : 1.0) * m[0][c] * Det(minor);
  }
  return det;
}

inline double ParetoDet(const std::vector<std::vector<int>>& a, const std::vector<double>& q) {
  const int n = static_cast<int>(a.size());
  Matrix m(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m[i][j] = i == j ? 1.0 - q[i] : -a[i][j] * q[i];
  }
  return Det(m);
}

inline Matrix Stability(const std::vector<std::vector<int>>& a, const std::vector<double>& q) {
  const std::size_t n = a.size();
  Matrix c(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      c[i][j] = i == j ? 2.0 : -a[i][j] * (q[i] / (1.0 - q[j]) + q[j] / (1.0 - q[i]));
    }
  }
  return c;
}

// Sylvester: every leading principal minor positive.
inline bool LeadingMinorsPositive(const Matrix& c) {
  for (std::size_t k = 1; k <= c.size(); ++k) {
    Matrix sub(k, std::vector<double>(k));
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) sub[i][j] = c[i][j];
    }
    if (!(Det(sub) > 0.0)) return false;
  }
  return true;
}

inline bool Connected(const std::vector<std::vector<int>>& a) {
  const int n = static_cast<int>(a.size());
  if (n == 0) return true;
  std::vector<int> seen(n, 0);
  std::queue<int> todo;
  todo.push(0);
  seen[0] = 1;
  while (!todo.empty()) {
    int u = todo.front();
    todo.pop();
    for (int v = 0; v < n; ++v) {
      if (a[u][v] && !seen[v]) {
        seen[v] = 1;
        todo.push(v);
      }
    }
  }
  for (int s : seen) {
    if (!s) return false;
  }
  return true;
}

inline double CentralDiff(const std::function<double(double)>& f, double x, double h = 1e-6) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Root of an increasing function by plain bisection, fixed 200 halvings.
inline double Bisect(const std::function<double(double)>& f, double lo, double hi) {
  for (int k = 0; k < 200; ++k) {
    double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline std::vector<std::pair<int, int>> RandomEdges(int n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  std::vector<std::pair<int, int>> edges;
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      if (coin(rng)) edges.emplace_back(i, j);
    }
  }
  return edges;
}

}  // namespace oracle
