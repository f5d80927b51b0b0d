#include "sale/analysis.h"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <string>

namespace sale::analysis {
namespace {

void CheckLength(const InterferenceGraph& g, std::span<const double> v,
                 const char* what) {
  if (static_cast<int>(v.size()) != g.size()) {
    throw std::invalid_argument(std::string(what) + " has length " +
                                std::to_string(v.size()) + ", graph has " +
                                std::to_string(g.size()) + " users");
  }
}

void CheckBelowOne(std::span<const double> q) {
  for (double qi : q) {
    if (!(qi < 1.0)) throw std::domain_error("MAP equal to 1 makes 1/(1-q) undefined");
  }
}

double SurvivalProduct(const InterferenceGraph& g, std::span<const double> q, int i) {
  double prod = 1.0;
  for (int j : g.neighbors(i)) prod *= 1.0 - q[j];
  return prod;
}

// Bisection for the root of an increasing function on (lo, hi).
template <typename F>
double BisectIncreasing(F&& f, double target, double lo, double hi, double tol) {
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

RateVector Throughput(const InterferenceGraph& g, std::span<const double> q) {
  CheckLength(g, q, "MAP vector");
  RateVector theta(g.size());
  for (int i = 0; i < g.size(); ++i) theta[i] = q[i] * SurvivalProduct(g, q, i);
  return theta;
}

MapVector BestResponseStep(const InterferenceGraph& g, std::span<const double> q,
                           std::span<const double> y) {
  CheckLength(g, q, "MAP vector");
  CheckLength(g, y, "target rate vector");
  MapVector next(g.size());
  for (int i = 0; i < g.size(); ++i) {
    const double prod = SurvivalProduct(g, q, i);
    if (y[i] <= 0.0) {
      next[i] = 0.0;
    } else if (prod <= 0.0) {
      next[i] = 1.0;
    } else {
      next[i] = std::min(y[i] / prod, 1.0);
    }
  }
  return next;
}

SolveReport SolveNash(const InterferenceGraph& g, std::span<const double> y,
                      double tol, int max_iter,
                      const std::function<void(std::span<const double>)>& on_step) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  CheckLength(g, y, "target rate vector");
  SolveReport report;
  report.q.assign(g.size(), 0.0);
  for (int it = 1; it <= max_iter; ++it) {
    MapVector next = BestResponseStep(g, report.q, y);
    double change = 0.0;
    bool dead_end = false;
    for (int i = 0; i < g.size(); ++i) {
      change = std::max(change, std::abs(next[i] - report.q[i]));
      dead_end = dead_end || next[i] >= kDivergenceThreshold;
    }
    report.q = std::move(next);
    report.iterations = it;
    if (on_step) on_step(report.q);
    if (dead_end) {
      report.outcome = SolveOutcome::kDivergedToOne;
      return report;
    }
    if (change <= tol) {
      report.outcome = SolveOutcome::kConverged;
      return report;
    }
  }
  report.outcome = SolveOutcome::kMaxIterations;
  return report;
}

Eigen::MatrixXd StabilityMatrix(const InterferenceGraph& g, std::span<const double> q) {
  CheckLength(g, q, "MAP vector");
  CheckBelowOne(q);
  const int n = g.size();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    c(i, i) = 2.0;
    for (int j : g.neighbors(i)) {
      c(i, j) = -q[i] / (1.0 - q[j]) - q[j] / (1.0 - q[i]);
    }
  }
  return c;
}

bool IsPositiveDefinite(const Eigen::MatrixXd& c, double pivot_tol) {
  if (c.rows() != c.cols()) throw std::invalid_argument("matrix is not square");
  const Eigen::Index n = c.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double scale = std::max({1.0, std::abs(c(i, j)), std::abs(c(j, i))});
      if (std::abs(c(i, j) - c(j, i)) > 1e-12 * scale) {
        throw std::invalid_argument("matrix is not symmetric");
      }
    }
  }
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = c(j, j) - l.row(j).head(j).squaredNorm();
    if (!(pivot > pivot_tol)) return false;
    l(j, j) = std::sqrt(pivot);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      l(i, j) = (c(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / l(j, j);
    }
  }
  return true;
}

double Rim(const InterferenceGraph& g, std::span<const double> q, int i) {
  CheckLength(g, q, "MAP vector");
  double r = 0.0;
  for (int j : g.neighbors(i)) {
    if (!(q[j] < 1.0) || !(q[i] < 1.0)) {
      throw std::domain_error("RIM undefined at MAP 1");
    }
    r += q[i] / (1.0 - q[j]) + q[j] / (1.0 - q[i]);
  }
  return r;
}

std::vector<double> Rims(const InterferenceGraph& g, std::span<const double> q) {
  std::vector<double> r(g.size());
  for (int i = 0; i < g.size(); ++i) r[i] = Rim(g, q, i);
  return r;
}

double JacobianDet(const InterferenceGraph& g, std::span<const double> q) {
  CheckLength(g, q, "MAP vector");
  const int n = g.size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = 1.0 - q[i];
    for (int j : g.neighbors(i)) m(i, j) = -q[i];
  }
  return m.partialPivLu().determinant();
}

double SteadyStateSingle(int n_l) {
  if (n_l < 0) throw std::invalid_argument("node degree must be nonnegative");
  return 1.0 / (n_l + 1.0);
}

MapVector SolveSteadyState(const InterferenceGraph& g, const TreePartition& partition) {
  partition.Validate(g);
  const int n = g.size();
  const std::vector<int> root = partition.roots();
  const std::vector<int> leaders = partition.leaders();

  // value[l]: common MAP of the tree led by l.
  std::vector<double> value(n, 0.0);
  std::vector<std::vector<int>> depends_on(n);  // leader -> trees it reads
  for (int l : leaders) {
    value[l] = SteadyStateSingle(g.degree(l));
    for (int j : g.neighbors(l)) {
      if (root[j] != l) depends_on[l].push_back(root[j]);
    }
    std::sort(depends_on[l].begin(), depends_on[l].end());
    depends_on[l].erase(std::unique(depends_on[l].begin(), depends_on[l].end()),
                        depends_on[l].end());
  }

  // Kahn order over the tree-dependency relation; leaders left over sit on
  // (or behind) a cycle and are appended in ID order.
  std::vector<int> pending(n, 0);
  std::vector<std::vector<int>> dependents(n);
  for (int l : leaders) {
    pending[l] = static_cast<int>(depends_on[l].size());
    for (int t : depends_on[l]) dependents[t].push_back(l);
  }
  std::vector<int> order;
  std::vector<char> placed(n, 0);
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (int l : leaders) {
    if (pending[l] == 0) ready.push(l);
  }
  while (!ready.empty()) {
    const int l = ready.top();
    ready.pop();
    order.push_back(l);
    placed[l] = 1;
    for (int d : dependents[l]) {
      if (--pending[d] == 0) ready.push(d);
    }
  }
  for (int l : leaders) {
    if (!placed[l]) order.push_back(l);
  }

  auto leader_rim = [&](int l, double x) {
    double r = 0.0;
    for (int j : g.neighbors(l)) {
      const double qj = root[j] == l ? x : value[root[j]];
      r += x / (1.0 - qj) + qj / (1.0 - x);
    }
    return r;
  };

  constexpr int kMaxSweeps = 10000;
  constexpr double kSweepTol = 1e-10;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double change = 0.0;
    for (int l : order) {
      if (depends_on[l].empty()) continue;
      double next = 0.0;
      if (leader_rim(l, 0.0) < 2.0) {
        next = BisectIncreasing([&](double x) { return leader_rim(l, x); }, 2.0,
                                0.0, 1.0, 1e-14);
      }
      change = std::max(change, std::abs(next - value[l]));
      value[l] = next;
    }
    if (change <= kSweepTol) {
      MapVector q(n);
      for (int i = 0; i < n; ++i) q[i] = value[root[i]];
      return q;
    }
  }
  throw std::runtime_error("steady-state sweeps did not settle");
}

double SensitivityAtRim(int n_l, double eps) {
  if (n_l < 1) throw std::invalid_argument("sensitivity needs n_l >= 1");
  if (!(2.0 + eps > 0.0)) throw std::invalid_argument("RIM 2 + eps must be positive");
  const double n = n_l;
  const double denom = 2.0 + eps + 2.0 * n;
  const double q = (2.0 + eps) / denom;
  return 2.0 * n * (1.0 - (n + 1.0) * q) * std::pow(1.0 - q, n - 1.0) / (denom * denom);
}

double LeaderGain(int n_l) {
  if (n_l < 1) throw std::invalid_argument("isolated user has no controlled plant");
  const double n = n_l;
  return -2.0 * (n + 1.0) * (n + 1.0) / n;
}

double AffectedOperatingPoint(int n_l1, double q_m) {
  if (n_l1 < 1) throw std::invalid_argument("affected leader needs n_l1 >= 1");
  if (!(q_m >= 0.0 && q_m < 1.0)) throw std::domain_error("q_m must lie in [0,1)");
  auto rim = [&](double x) {
    return 2.0 * (n_l1 - 1) * x / (1.0 - x) + x / (1.0 - q_m) + q_m / (1.0 - x);
  };
  if (rim(0.0) >= 2.0) throw std::domain_error("R' exceeds 2 at q' = 0");
  return BisectIncreasing(rim, 2.0, 0.0, 1.0, 1e-15);
}

double AffectedLeaderGain(int n_l1, double q_m, double q_op) {
  if (n_l1 < 2) throw std::invalid_argument("affected leader gain needs n_l1 >= 2");
  if (!(q_m >= 0.0 && q_m <= 1.0 / (n_l1 + 1.0) + 1e-15)) {
    throw std::domain_error("q_m must lie in [0, 1/(n_l1+1)]");
  }
  if (!(q_op > 0.0 && q_op < 1.0)) throw std::domain_error("q_op must lie in (0,1)");
  const double s = (1.0 - q_op) * (1.0 - q_op);
  return -2.0 * (n_l1 - 1) / s - 1.0 / (1.0 - q_m) - q_m / s;
}

double AffectedLeaderSensitivity(int n_l1, double q_m) {
  const double q = AffectedOperatingPoint(n_l1, q_m);
  const double k = AffectedLeaderGain(n_l1, q_m, q);
  const double slope =
      (1.0 - q_m) * std::pow(1.0 - q, n_l1 - 2.0) * (1.0 - n_l1 * q);
  return slope * (-1.0 / k);
}

double FollowerThroughputSlope(int n_j, int n_l) {
  if (n_j < 0 || n_l < 0) throw std::invalid_argument("degrees must be nonnegative");
  const double q = SteadyStateSingle(n_l);
  return (1.0 - (n_j + 1.0) * q) * std::pow(1.0 - q, n_j - 1.0);
}

bool PiStabilityCheck(int n_l, double k_p, double k_i) {
  const double k = LeaderGain(n_l);
  return k_p > 0.0 && k_i > 0.0 && -k * (2.0 * k_p + k_i) < 2.0;
}

}  // namespace sale::analysis
