#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sale/partition.h"

namespace sale {

enum class EventKind { kElection, kHandover, kReelection, kCycleRepair, kConvergence };

const char* EventKindName(EventKind kind);

struct Event {
  int iteration = 0;
  EventKind kind = EventKind::kElection;
  int user = 0;                // 0-based
  int previous = kNoParent;    // old leader for handovers, else kNoParent
};

struct TraceRow {
  int iteration = 0;
  double seconds = 0.0;
  std::vector<double> q;
  std::vector<double> rim;
  std::vector<double> theta;  // analytic in ideal mode, per-frame empirical in packet mode
  std::vector<int> leaders;   // users holding an active controller
  std::vector<char> declaring;
};

enum class RunOutcome { kConverged, kMaxIterations, kOscillating };

const char* RunOutcomeName(RunOutcome outcome);

struct RunTrace {
  int n_users = 0;
  double iteration_seconds = 0.0;
  std::vector<TraceRow> rows;
  std::vector<Event> events;
  RunOutcome outcome = RunOutcome::kMaxIterations;
  std::optional<int> converged_at;
  std::vector<double> final_q;
  TreePartition final_partition;
  std::vector<double> measured_theta;  // packet mode only

  bool converged() const { return outcome == RunOutcome::kConverged; }
  // Leader-RIM series of one user over all rows.
  std::vector<double> RimSeries(int user) const;
  bool HasHandover(int from, int to) const;
};

// One row per iteration: iteration, seconds, q_1..q_N, R_1..R_N,
// theta_1..theta_N, leaders ("1;7"), events ("handover:7>8").
// User numbers are 1-based.
void WriteTraceCsv(const RunTrace& trace, std::ostream& out);
void WriteTraceCsv(const RunTrace& trace, const std::string& path);

std::string FormatEvent(const Event& e);

}  // namespace sale
