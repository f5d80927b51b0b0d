#include "sale/metrics.h"

#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "sale/analysis.h"
#include "sale/protocol.h"

namespace sale {

double JainWeighted(const InterferenceGraph& g, std::span<const double> theta) {
  if (static_cast<int>(theta.size()) != g.size() || theta.empty()) {
    throw std::invalid_argument("throughput vector length mismatch");
  }
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    const double w = (g.degree(i) + 1) * theta[i];
    sum += w;
    sum_sq += w * w;
  }
  if (sum_sq == 0.0) throw std::domain_error("Jain index undefined for all-zero throughput");
  return sum * sum / (g.size() * sum_sq);
}

std::vector<double> NetThroughput(std::span<const double> theta, int l_s, int overhead_bits) {
  if (l_s <= 0 || overhead_bits < 0 || overhead_bits >= l_s) {
    throw std::invalid_argument("need 0 <= overhead_bits < l_s");
  }
  const double keep = 1.0 - static_cast<double>(overhead_bits) / l_s;
  std::vector<double> out(theta.begin(), theta.end());
  for (double& v : out) v *= keep;
  return out;
}

std::optional<int> ConvergenceTime(const RunTrace& trace, double tol, int window) {
  if (trace.rows.empty()) throw std::invalid_argument("empty trace");
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  std::span<const TraceRow> rows(trace.rows);
  for (std::size_t end = window; end <= rows.size(); ++end) {
    if (WindowConverged(rows.first(end), tol, window)) {
      return rows[end - window].iteration;
    }
  }
  return std::nullopt;
}

std::optional<int> ConvergenceTime(std::span<const double> rim, double tol, int window) {
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  int run = 0;
  for (std::size_t t = 0; t < rim.size(); ++t) {
    run = std::abs(rim[t] - 2.0) <= tol ? run + 1 : 0;
    if (run == window) return static_cast<int>(t) + 1 - window;
  }
  return std::nullopt;
}

namespace {

constexpr double kNashTol = 1e-8;
constexpr int kNashMaxIter = 100000;

std::optional<std::vector<double>> Reach(const InterferenceGraph& g,
                                         std::span<const double> theta, double d) {
  std::vector<double> y(theta.begin(), theta.end());
  for (double& v : y) v *= d;
  auto report = analysis::SolveNash(g, y, kNashTol, kNashMaxIter);
  if (report.outcome != analysis::SolveOutcome::kConverged) return std::nullopt;
  return std::move(report.q);
}

}  // namespace

ParetoResult ParetoSearch(const InterferenceGraph& g, std::span<const double> theta,
                          double tol) {
  if (static_cast<int>(theta.size()) != g.size()) {
    throw std::invalid_argument("throughput vector length mismatch");
  }
  auto base = Reach(g, theta, 1.0);
  if (!base) throw std::domain_error("throughput vector is not stably achievable");
  ParetoResult best{1.0, std::move(*base)};
  double hi = 2.0;
  for (;;) {
    auto q = Reach(g, theta, hi);
    if (!q) break;
    best = {hi, std::move(*q)};
    hi *= 2.0;
    if (hi > 1e12) throw std::domain_error("throughput vector is zero along every user");
  }
  double lo = best.d;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (auto q = Reach(g, theta, mid)) {
      lo = mid;
      best = {mid, std::move(*q)};
    } else {
      hi = mid;
    }
  }
  return best;
}

double DistanceToPareto(const InterferenceGraph& g, std::span<const double> theta) {
  return ParetoSearch(g, theta).d;
}

MetricsReport ComputeMetrics(const InterferenceGraph& g, const RunTrace& trace,
                             const FrameConfig& frame, const MetricsOptions& opts) {
  MetricsReport m;
  m.n_users = g.size();
  m.mode = trace.measured_theta.empty() ? "ideal" : "packet";
  m.outcome = RunOutcomeName(trace.outcome);
  m.final_q = trace.final_q;
  m.final_rim = analysis::Rims(g, trace.final_q);
  const std::vector<double> analytic = analysis::Throughput(g, trace.final_q);
  m.theta = trace.measured_theta.empty() ? analytic : trace.measured_theta;
  m.total_theta = std::accumulate(m.theta.begin(), m.theta.end(), 0.0);
  m.mean_theta = m.total_theta / g.size();
  const auto net = NetThroughput(m.theta, frame.l_s, frame.header_overhead_bits);
  m.mean_net_theta = std::accumulate(net.begin(), net.end(), 0.0) / g.size();
  m.jain = JainWeighted(g, m.theta);
  if (opts.with_pareto) m.d_pareto = DistanceToPareto(g, analytic);
  m.convergence_iterations = ConvergenceTime(trace, opts.conv_tol, opts.conv_window);
  if (m.convergence_iterations) {
    m.convergence_seconds = *m.convergence_iterations * trace.iteration_seconds;
  }
  m.leader_count = static_cast<int>(trace.final_partition.leaders().size());
  m.max_height = trace.final_partition.max_height();
  return m;
}

std::string FormatMetrics(const MetricsReport& m) {
  std::ostringstream out;
  out << std::setprecision(6);
  out << "users = " << m.n_users << "\n";
  out << "mode = " << m.mode << "\n";
  out << "outcome = " << m.outcome << "\n";
  out << "mean_theta = " << m.mean_theta << "\n";
  out << "total_theta = " << m.total_theta << "\n";
  out << "mean_net_theta = " << m.mean_net_theta << "\n";
  out << "jain = " << m.jain << "\n";
  out << "d_pareto = ";
  if (m.d_pareto) {
    out << *m.d_pareto << "\n";
  } else {
    out << "none\n";
  }
  if (m.convergence_iterations) {
    out << "convergence_iterations = " << *m.convergence_iterations << "\n";
    out << "convergence_seconds = " << *m.convergence_seconds << "\n";
  } else {
    out << "convergence_iterations = none\n";
    out << "convergence_seconds = none\n";
  }
  out << "leaders = " << m.leader_count << "\n";
  out << "max_tree_height = " << m.max_height << "\n";
  for (std::size_t i = 0; i < m.final_q.size(); ++i) {
    out << "q_" << i + 1 << " = " << m.final_q[i] << "\n";
  }
  for (std::size_t i = 0; i < m.final_rim.size(); ++i) {
    out << "R_" << i + 1 << " = " << m.final_rim[i] << "\n";
  }
  for (std::size_t i = 0; i < m.theta.size(); ++i) {
    out << "theta_" << i + 1 << " = " << m.theta[i] << "\n";
  }
  return out.str();
}

std::string MetricsJson(const MetricsReport& m) {
  nlohmann::json j;
  j["users"] = m.n_users;
  j["mode"] = m.mode;
  j["outcome"] = m.outcome;
  j["mean_theta"] = m.mean_theta;
  j["total_theta"] = m.total_theta;
  j["mean_net_theta"] = m.mean_net_theta;
  j["jain"] = m.jain;
  j["d_pareto"] = m.d_pareto ? nlohmann::json(*m.d_pareto) : nlohmann::json();
  j["convergence_iterations"] =
      m.convergence_iterations ? nlohmann::json(*m.convergence_iterations) : nlohmann::json();
  j["convergence_seconds"] =
      m.convergence_seconds ? nlohmann::json(*m.convergence_seconds) : nlohmann::json();
  j["leaders"] = m.leader_count;
  j["max_tree_height"] = m.max_height;
  j["theta"] = m.theta;
  j["final_q"] = m.final_q;
  j["final_rim"] = m.final_rim;
  return j.dump(2) + "\n";
}

}  // namespace sale
