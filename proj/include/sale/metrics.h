#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sale/simnet.h"
#include "sale/topology.h"
#include "sale/trace.h"

namespace sale {

// Jain index of degree-weighted throughputs (N_i + 1) theta_i.
// Throws std::domain_error for an all-zero vector.
double JainWeighted(const InterferenceGraph& g, std::span<const double> theta);

// theta_i (1 - overhead_bits / l_s).
std::vector<double> NetThroughput(std::span<const double> theta, int l_s, int overhead_bits);

// First iteration t such that rows [t, t + window) all have controlled
// leaders within tol of R = 2 and nobody declaring. nullopt if never.
std::optional<int> ConvergenceTime(const RunTrace& trace, double tol = 0.05, int window = 5);
// Same test on a single RIM series.
std::optional<int> ConvergenceTime(std::span<const double> rim, double tol, int window);

struct ParetoResult {
  double d = 1.0;
  std::vector<double> q;  // fixed point reached at target d * theta
};

// Largest d for which best response from q = 0 still converges on the
// target d * theta (tol 1e-8, 1e5 iterations). Bracket by doubling from 2,
// then bisect to `tol`. Throws std::domain_error if theta itself is not
// reachable.
ParetoResult ParetoSearch(const InterferenceGraph& g, std::span<const double> theta,
                          double tol = 1e-4);
double DistanceToPareto(const InterferenceGraph& g, std::span<const double> theta);

struct MetricsReport {
  int n_users = 0;
  std::string mode;
  std::string outcome;
  std::vector<double> theta;
  double mean_theta = 0.0;
  double total_theta = 0.0;
  double mean_net_theta = 0.0;
  double jain = 0.0;
  std::optional<double> d_pareto;  // unset when the search was skipped
  std::optional<int> convergence_iterations;
  std::optional<double> convergence_seconds;
  int leader_count = 0;
  int max_height = 0;
  std::vector<double> final_q;
  std::vector<double> final_rim;
};

struct MetricsOptions {
  double conv_tol = 0.05;
  int conv_window = 5;
  bool with_pareto = true;
};

// Throughput figures use the measured per-user success rate when the trace
// has one (packet mode) and theta(final q) otherwise. d_pareto is always
// evaluated on theta(final q).
MetricsReport ComputeMetrics(const InterferenceGraph& g, const RunTrace& trace,
                             const FrameConfig& frame, const MetricsOptions& opts = {});

// Flat "key = value" block.
std::string FormatMetrics(const MetricsReport& m);
std::string MetricsJson(const MetricsReport& m);

}  // namespace sale
