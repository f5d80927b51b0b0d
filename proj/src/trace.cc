#include "sale/trace.h"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace sale {

const char* EventKindName(EventKind kind) {
  switch (kind) {
    case EventKind::kElection: return "election";
    case EventKind::kHandover: return "handover";
    case EventKind::kReelection: return "reelection";
    case EventKind::kCycleRepair: return "cycle_repair";
    case EventKind::kConvergence: return "convergence";
  }
  return "unknown";
}

const char* RunOutcomeName(RunOutcome outcome) {
  switch (outcome) {
    case RunOutcome::kConverged: return "converged";
    case RunOutcome::kMaxIterations: return "max_iterations";
    case RunOutcome::kOscillating: return "oscillating";
  }
  return "unknown";
}

std::vector<double> RunTrace::RimSeries(int user) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row.rim.at(user));
  return out;
}

bool RunTrace::HasHandover(int from, int to) const {
  for (const auto& e : events) {
    if (e.kind == EventKind::kHandover && e.user == to && e.previous == from) return true;
  }
  return false;
}

std::string FormatEvent(const Event& e) {
  std::string s = EventKindName(e.kind);
  if (e.kind == EventKind::kConvergence) return s;
  s += ':';
  if (e.previous != kNoParent) s += std::to_string(e.previous + 1) + '>';
  s += std::to_string(e.user + 1);
  return s;
}

void WriteTraceCsv(const RunTrace& trace, std::ostream& out) {
  const int n = trace.n_users;
  out << "iteration,seconds";
  for (const char* col : {"q_", "R_", "theta_"}) {
    for (int i = 1; i <= n; ++i) out << ',' << col << i;
  }
  out << ",leaders,events\n";
  out << std::setprecision(10);
  std::vector<Event> events = trace.events;
  std::stable_sort(events.begin(), events.end(),
                   [](const Event& a, const Event& b) { return a.iteration < b.iteration; });
  std::size_t next_event = 0;
  for (const auto& row : trace.rows) {
    out << row.iteration << ',' << row.seconds;
    for (const auto* series : {&row.q, &row.rim, &row.theta}) {
      for (double v : *series) out << ',' << v;
    }
    out << ',';
    for (std::size_t k = 0; k < row.leaders.size(); ++k) {
      if (k) out << ';';
      out << row.leaders[k] + 1;
    }
    out << ',';
    bool first = true;
    while (next_event < events.size() &&
           events[next_event].iteration <= row.iteration) {
      if (events[next_event].iteration == row.iteration) {
        if (!first) out << ';';
        out << FormatEvent(events[next_event]);
        first = false;
      }
      ++next_event;
    }
    out << '\n';
  }
}

void WriteTraceCsv(const RunTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace '" + path + "'");
  WriteTraceCsv(trace, out);
}

}  // namespace sale
