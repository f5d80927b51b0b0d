#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "sale/partition.h"
#include "sale/topology.h"
#include "sale/trace.h"

// SALE protocol logic: preliminary local leader election, PI control of
// leader MAPs, follower propagation and leadership validation, run in the
// idealized setting where every broadcast reaches every neighbor once per
// iteration.
namespace sale {

struct PiGains {
  double kp = 0.0;
  double ki = 0.0;
};

// Ziegler-Nichols gains for a leader of degree n_l:
// Kp = 0.2 n_l/(n_l+1)^2, Ki = Kp/1.7.
PiGains PiGainsFor(int n_l);

// Incremental PI law with setpoint R = 2:
//   q(t) = q(t-1) + Kp [e(t) - e(t-1)] + Ki e(t),  e = 2 - R,
// output clamped to [q_min, q_max].
class PiController {
 public:
  static constexpr double kSetpoint = 2.0;

  PiController(PiGains gains, double e_prev, double q, double q_min, double q_max);

  double Step(double r_measured);

  const PiGains& gains() const { return gains_; }
  double e_prev() const { return e_prev_; }
  double output() const { return q_; }
  void set_output(double q) { q_ = q; }

 private:
  PiGains gains_;
  double e_prev_;
  double q_;
  double q_min_;
  double q_max_;
};

// What a user knows about one neighbor during election.
struct NeighborView {
  int id = 0;
  int degree = 0;
};

// Leaders are users whose (degree, -id) beats every neighbor's. Everyone else
// follows the neighbor with the largest (degree, -id). Returns nullopt for a
// leader.
std::optional<int> ChooseParent(int self, int degree, std::span<const NeighborView> neighbors);

TreePartition ElectLeaders(const InterferenceGraph& g);
TreePartition ElectLeaders(const InterferenceGraph& g, std::span<const int> degrees);

struct RunConfig {
  double q_init = 0.05;
  double tol = 1e-3;
  int window = 5;
  int max_iter = 1000;
  double gain_multiplier = 1.0;
  double q_min = 0.001;
  double q_max = 0.999;
  double declare_margin = 0.01;
  double iteration_seconds = 0.01;

  // Throws std::invalid_argument on out-of-range fields.
  void Validate() const;
};

struct Handover {
  int winner = 0;
  std::vector<int> demoted;  // former leaders now following the winner
};

// Leadership validation. `declared` holds last round's Declare flags and
// heard(o, s) says whether o received s's declaration. A declarer that is not
// already a leader wins unless it heard a smaller-ID declarer. Each leader
// that heard an adjacent winner follows the smallest such winner.
std::vector<Handover> ResolveDeclarations(const InterferenceGraph& g,
                                          std::span<const char> declared,
                                          const std::function<bool(int, int)>& heard,
                                          TreePartition& partition);

// Iteration state of the idealized protocol.
class SaleState {
 public:
  SaleState(const InterferenceGraph& g, const RunConfig& cfg);
  // Resume from a given MAP vector and partition (controllers bootstrapped
  // from the current RIM).
  SaleState(const InterferenceGraph& g, const RunConfig& cfg, std::vector<double> q,
            TreePartition partition);

  // One round of the protocol; the returned row describes the state the
  // round started from.
  TraceRow Iterate();

  const InterferenceGraph& graph() const { return *g_; }
  const std::vector<double>& q() const { return q_; }
  const TreePartition& partition() const { return partition_; }
  const std::map<int, PiController>& controllers() const { return controllers_; }
  const std::vector<char>& declare() const { return declare_; }
  int iteration() const { return t_; }
  // Events raised so far (election at construction, handovers).
  const std::vector<Event>& events() const { return events_; }

 private:
  void StartController(int leader, double rim, double q);

  const InterferenceGraph* g_;
  RunConfig cfg_;
  std::vector<double> q_;
  std::vector<char> declare_;
  TreePartition partition_;
  std::map<int, PiController> controllers_;
  std::vector<Event> events_;
  int t_ = 0;
};

// True when the last `window` rows all have at least one controlled leader,
// every controlled leader within tol of R = 2 and no declaring user.
bool WindowConverged(std::span<const TraceRow> rows, double tol, int window);

// Oscillation flag for a run that did not converge: max |R_l - 2| over
// the last 50 rows exceeds 0.5.
bool LooksOscillating(std::span<const TraceRow> rows);

RunTrace RunIdeal(const InterferenceGraph& g, const RunConfig& cfg);
RunTrace RunIdeal(SaleState& state, const RunConfig& cfg);

}  // namespace sale
