#include "sale/protocol.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "sale/analysis.h"

namespace sale {

PiGains PiGainsFor(int n_l) {
  if (n_l < 1) throw std::invalid_argument("PI gains need a leader degree >= 1");
  const double n = n_l;
  const double kp = 0.2 * n / ((n + 1.0) * (n + 1.0));
  const double ki = 2.0 * n / (17.0 * (n + 1.0) * (n + 1.0));
  return {kp, ki};
}

PiController::PiController(PiGains gains, double e_prev, double q, double q_min,
                           double q_max)
    : gains_(gains), e_prev_(e_prev), q_(q), q_min_(q_min), q_max_(q_max) {
  if (!(gains.kp > 0.0) || !(gains.ki > 0.0)) {
    throw std::invalid_argument("PI gains must be positive");
  }
}

double PiController::Step(double r_measured) {
  const double e = kSetpoint - r_measured;
  q_ = q_ + gains_.kp * (e - e_prev_) + gains_.ki * e;
  q_ = std::clamp(q_, q_min_, q_max_);
  e_prev_ = e;
  return q_;
}

namespace {

bool Beats(int deg_a, int id_a, int deg_b, int id_b) {
  return deg_a > deg_b || (deg_a == deg_b && id_a < id_b);
}

}  // namespace

std::optional<int> ChooseParent(int self, int degree, std::span<const NeighborView> neighbors) {
  std::optional<int> best;
  int best_deg = degree;
  int best_id = self;
  for (const auto& nb : neighbors) {
    if (Beats(nb.degree, nb.id, best_deg, best_id)) {
      best = nb.id;
      best_deg = nb.degree;
      best_id = nb.id;
    }
  }
  return best;
}

TreePartition ElectLeaders(const InterferenceGraph& g, std::span<const int> degrees) {
  if (static_cast<int>(degrees.size()) != g.size()) {
    throw std::invalid_argument("degree vector length mismatch");
  }
  TreePartition p;
  p.parent.assign(g.size(), kNoParent);
  std::vector<NeighborView> views;
  for (int i = 0; i < g.size(); ++i) {
    views.clear();
    for (int j : g.neighbors(i)) views.push_back({j, degrees[j]});
    p.parent[i] = ChooseParent(i, degrees[i], views).value_or(kNoParent);
  }
  return p;
}

TreePartition ElectLeaders(const InterferenceGraph& g) {
  std::vector<int> degrees(g.size());
  for (int i = 0; i < g.size(); ++i) degrees[i] = g.degree(i);
  return ElectLeaders(g, degrees);
}

void RunConfig::Validate() const {
  if (!(q_min > 0.0 && q_min < q_max && q_max < 1.0)) {
    throw std::invalid_argument("need 0 < q_min < q_max < 1");
  }
  if (!(q_init >= 0.0 && q_init <= q_max)) {
    throw std::invalid_argument("q_init must lie in [0, q_max]");
  }
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  if (!(gain_multiplier > 0.0)) throw std::invalid_argument("gain_multiplier must be positive");
  if (!(declare_margin >= 0.0)) throw std::invalid_argument("declare_margin must be >= 0");
  if (!(iteration_seconds > 0.0)) throw std::invalid_argument("iteration_seconds must be positive");
}

std::vector<Handover> ResolveDeclarations(const InterferenceGraph& g,
                                          std::span<const char> declared,
                                          const std::function<bool(int, int)>& heard,
                                          TreePartition& partition) {
  std::vector<int> winners;
  for (int w = 0; w < g.size(); ++w) {
    if (!declared[w] || partition.is_leader(w)) continue;
    bool beaten = false;
    for (int j : g.neighbors(w)) {
      if (j < w && declared[j] && heard(w, j)) {
        beaten = true;
        break;
      }
    }
    if (!beaten) winners.push_back(w);
  }
  if (winners.empty()) return {};

  std::vector<char> is_winner(g.size(), 0);
  for (int w : winners) is_winner[w] = 1;
  std::vector<Handover> out;
  std::vector<int> index(g.size(), -1);
  for (int w : winners) {
    index[w] = static_cast<int>(out.size());
    out.push_back({w, {}});
  }
  // Decide demotions on the pre-handover leader set.
  std::vector<std::pair<int, int>> demote;
  for (int l = 0; l < g.size(); ++l) {
    if (!partition.is_leader(l)) continue;
    for (int w : g.neighbors(l)) {  // sorted, so the first hit is the smallest
      if (is_winner[w] && heard(l, w)) {
        demote.emplace_back(l, w);
        break;
      }
    }
  }
  for (int w : winners) partition.parent[w] = kNoParent;
  for (auto [l, w] : demote) {
    partition.parent[l] = w;
    out[index[w]].demoted.push_back(l);
  }
  return out;
}

SaleState::SaleState(const InterferenceGraph& g, const RunConfig& cfg)
    : SaleState(g, cfg, std::vector<double>(g.size(), cfg.q_init), ElectLeaders(g)) {}

SaleState::SaleState(const InterferenceGraph& g, const RunConfig& cfg,
                     std::vector<double> q, TreePartition partition)
    : g_(&g), cfg_(cfg), q_(std::move(q)), declare_(g.size(), 0),
      partition_(std::move(partition)) {
  cfg_.Validate();
  if (static_cast<int>(q_.size()) != g.size()) {
    throw std::invalid_argument("MAP vector length mismatch");
  }
  partition_.Validate(g);
  for (int l : partition_.leaders()) {
    if (g.degree(l) == 0) q_[l] = cfg_.q_max;
  }
  const std::vector<double> rim = analysis::Rims(g, q_);
  for (int l : partition_.leaders()) {
    events_.push_back({0, EventKind::kElection, l, kNoParent});
    if (g.degree(l) > 0) StartController(l, rim[l], q_[l]);
  }
}

void SaleState::StartController(int leader, double rim, double q) {
  PiGains gains = PiGainsFor(g_->degree(leader));
  gains.kp *= cfg_.gain_multiplier;
  gains.ki *= cfg_.gain_multiplier;
  controllers_.insert_or_assign(
      leader, PiController(gains, PiController::kSetpoint - rim, q, cfg_.q_min, cfg_.q_max));
}

TraceRow SaleState::Iterate() {
  const InterferenceGraph& g = *g_;
  TraceRow row;
  row.iteration = t_;
  row.seconds = t_ * cfg_.iteration_seconds;
  row.q = q_;
  row.rim = analysis::Rims(g, q_);
  row.theta = analysis::Throughput(g, q_);
  for (const auto& [l, ctrl] : controllers_) row.leaders.push_back(l);

  std::vector<double> next = q_;
  for (auto& [l, ctrl] : controllers_) next[l] = ctrl.Step(row.rim[l]);
  for (int j = 0; j < g.size(); ++j) {
    if (!partition_.is_leader(j)) next[j] = q_[partition_.parent[j]];
  }

  auto heard_all = [](int, int) { return true; };
  for (const Handover& h : ResolveDeclarations(g, declare_, heard_all, partition_)) {
    StartController(h.winner, row.rim[h.winner], next[h.winner]);
    if (h.demoted.empty()) events_.push_back({t_, EventKind::kHandover, h.winner, kNoParent});
    for (int l : h.demoted) {
      controllers_.erase(l);
      events_.push_back({t_, EventKind::kHandover, h.winner, l});
    }
  }

  for (int i = 0; i < g.size(); ++i) {
    declare_[i] = row.rim[i] > PiController::kSetpoint + cfg_.declare_margin;
  }
  row.declaring = declare_;
  q_ = std::move(next);
  ++t_;
  return row;
}

bool WindowConverged(std::span<const TraceRow> rows, double tol, int window) {
  if (static_cast<int>(rows.size()) < window) return false;
  for (auto it = rows.end() - window; it != rows.end(); ++it) {
    if (it->leaders.empty()) return false;
    for (int l : it->leaders) {
      if (!(std::abs(it->rim[l] - PiController::kSetpoint) <= tol)) return false;
    }
    for (char d : it->declaring) {
      if (d) return false;
    }
  }
  return true;
}

bool LooksOscillating(std::span<const TraceRow> rows) {
  const std::size_t span = std::min<std::size_t>(rows.size(), 50);
  double worst = 0.0;
  for (auto it = rows.end() - span; it != rows.end(); ++it) {
    for (int l : it->leaders) {
      worst = std::max(worst, std::abs(it->rim[l] - PiController::kSetpoint));
    }
  }
  return worst > 0.5;
}

RunTrace RunIdeal(SaleState& state, const RunConfig& cfg) {
  cfg.Validate();
  RunTrace trace;
  trace.n_users = state.graph().size();
  trace.iteration_seconds = cfg.iteration_seconds;
  const std::size_t first_event = state.events().size();
  const bool fresh = state.iteration() == 0;
  for (int k = 0; k < cfg.max_iter; ++k) {
    trace.rows.push_back(state.Iterate());
    if (WindowConverged(trace.rows, cfg.tol, cfg.window)) {
      trace.outcome = RunOutcome::kConverged;
      trace.converged_at = trace.rows[trace.rows.size() - cfg.window].iteration;
      break;
    }
  }
  const auto& ev = state.events();
  trace.events.assign(ev.begin() + (fresh ? 0 : first_event), ev.end());
  if (trace.converged()) {
    trace.events.push_back({*trace.converged_at, EventKind::kConvergence, 0, kNoParent});
  } else if (LooksOscillating(trace.rows)) {
    trace.outcome = RunOutcome::kOscillating;
  }
  trace.final_q = state.q();
  trace.final_partition = state.partition();
  return trace;
}

RunTrace RunIdeal(const InterferenceGraph& g, const RunConfig& cfg) {
  SaleState state(g, cfg);
  return RunIdeal(state, cfg);
}

}  // namespace sale
