#include "sale/simnet.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_set>

#include "sale/analysis.h"

namespace sale {

void FrameConfig::Validate() const {
  if (l_f < 1) throw std::invalid_argument("l_f must be >= 1");
  if (l_nd < l_f || l_nd % l_f != 0) {
    throw std::invalid_argument("l_nd must be a positive multiple of l_f");
  }
  if (l_s < 1) throw std::invalid_argument("l_s must be >= 1");
  if (header_overhead_bits < 0 || header_overhead_bits >= l_s) {
    throw std::invalid_argument("header overhead must lie in [0, l_s)");
  }
  if (!(r_b > 0.0)) throw std::invalid_argument("r_b must be positive");
}

void PacketRunConfig::Validate() const {
  run.Validate();
  if (measure_frames < 0) throw std::invalid_argument("measure_frames must be >= 0");
}

std::uint16_t EncodeMap(double q) {
  const double scaled = std::round(std::clamp(q, 0.0, 1.0) * 65535.0);
  return static_cast<std::uint16_t>(scaled);
}

double DecodeMap(std::uint16_t code) { return code / 65535.0; }

std::uint32_t PacketHeader::Pack() const {
  return (std::uint32_t{nd} << 17) | (std::uint32_t{map} << 1) | (declare ? 1u : 0u);
}

PacketHeader PacketHeader::Unpack(int sender, std::uint32_t bits) {
  if (bits >> 25) throw std::invalid_argument("header wider than 25 bits");
  PacketHeader h;
  h.sender = sender;
  h.nd = static_cast<std::uint8_t>(bits >> 17);
  h.map = static_cast<std::uint16_t>((bits >> 1) & 0xFFFF);
  h.declare = bits & 1u;
  return h;
}

void SimulateSlot(const InterferenceGraph& g, std::span<const double> q,
                  std::mt19937_64& rng, SlotOutcome& out) {
  const int n = g.size();
  if (static_cast<int>(q.size()) != n) throw std::invalid_argument("MAP vector length mismatch");
  std::uniform_real_distribution<double> u(0.0, 1.0);
  out.transmitted.assign(n, 0);
  out.success.assign(n, 0);
  out.heard_from.assign(n, -1);
  std::vector<int> busy(n, 0);
  for (int i = 0; i < n; ++i) out.transmitted[i] = u(rng) < q[i];
  for (int i = 0; i < n; ++i) {
    if (!out.transmitted[i]) continue;
    for (int j : g.neighbors(i)) {
      if (++busy[j] == 1) {
        out.heard_from[j] = i;
      } else {
        out.heard_from[j] = -1;
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    if (out.transmitted[i]) {
      out.success[i] = busy[i] == 0;
      out.heard_from[i] = -1;
    }
  }
}

SlotOutcome SimulateSlot(const InterferenceGraph& g, std::span<const double> q,
                         std::mt19937_64& rng) {
  SlotOutcome out;
  SimulateSlot(g, q, rng, out);
  return out;
}

int EstimateNd(std::span<const int> heard_senders) {
  std::unordered_set<int> distinct(heard_senders.begin(), heard_senders.end());
  return static_cast<int>(distinct.size());
}

namespace {

// Per-user view of the neighborhood, indexed by position in the sorted
// neighbor list.
class Knowledge {
 public:
  explicit Knowledge(const InterferenceGraph& g) : g_(g), offset_(g.size() + 1, 0) {
    for (int i = 0; i < g.size(); ++i) offset_[i + 1] = offset_[i] + g.degree(i);
    const std::size_t m = offset_.back();
    known.assign(m, 0);
    map.assign(m, 0.0);
    nd.assign(m, 0);
    nd_used.assign(m, 0);
    heard_frame.assign(m, 0);
    heard_window.assign(m, 0);
  }

  std::size_t Slot(int listener, int sender) const {
    auto nbrs = g_.neighbors(listener);
    auto it = std::lower_bound(nbrs.begin(), nbrs.end(), sender);
    return offset_[listener] + static_cast<std::size_t>(it - nbrs.begin());
  }
  std::size_t Begin(int i) const { return offset_[i]; }

  std::vector<char> known;
  std::vector<double> map;
  std::vector<int> nd;
  std::vector<int> nd_used;  // neighbor degrees at the listener's last election
  std::vector<char> heard_frame;
  std::vector<char> heard_window;

 private:
  const InterferenceGraph& g_;
  std::vector<std::size_t> offset_;
};

class PacketRun {
 public:
  PacketRun(const InterferenceGraph& g, const FrameConfig& frame, const PacketRunConfig& cfg)
      : g_(g), frame_(frame), cfg_(cfg), run_(cfg.run), n_(g.size()), know_(g),
        rng_(frame.seed), q_(n_, run_.q_init), nd_est_(n_, 0), window_count_(n_, 0),
        declare_(n_, 0) {
    partition_.parent.assign(n_, kNoParent);
  }

  RunTrace Run();

 private:
  double LocalRim(int i) const;
  void DeliverAll();
  void StartController(int leader, double rim, double q);
  void Lead(int leader, double rim, std::vector<double>& next);
  void Elect(int t, const std::vector<double>& rim, std::vector<double>& next);
  void Reelect(int t, const std::vector<int>& changed, const std::vector<double>& rim,
               std::vector<double>& next);
  void RepairCycles(int t, const std::vector<double>& rim, std::vector<double>& next);
  std::vector<NeighborView> KnownViews(int i);
  bool ViewsChanged(int i) const;
  int HeaderNd(int s) const { return std::min(elected_ ? nd_est_[s] : window_count_[s], 255); }

  const InterferenceGraph& g_;
  FrameConfig frame_;
  PacketRunConfig cfg_;
  RunConfig run_;
  int n_;
  Knowledge know_;
  std::mt19937_64 rng_;
  std::vector<double> q_;
  std::vector<int> nd_est_;
  std::vector<int> window_count_;
  std::vector<char> declare_;
  TreePartition partition_;
  std::map<int, PiController> controllers_;
  std::vector<Event> events_;
  bool elected_ = false;
};

double PacketRun::LocalRim(int i) const {
  double r = 0.0;
  const double qi = q_[i];
  std::size_t k = know_.Begin(i);
  for (int j : g_.neighbors(i)) {
    (void)j;
    if (know_.known[k]) {
      const double qj = know_.map[k];
      r += qi / (1.0 - qj) + qj / (1.0 - qi);
    }
    ++k;
  }
  return r;
}

void PacketRun::DeliverAll() {
  for (int j = 0; j < n_; ++j) {
    std::size_t k = know_.Begin(j);
    for (int s : g_.neighbors(j)) {
      know_.known[k] = 1;
      know_.map[k] = q_[s];
      know_.nd[k] = g_.degree(s);
      know_.heard_frame[k] = 1;
      ++k;
    }
  }
}

void PacketRun::StartController(int leader, double rim, double q) {
  PiGains gains = PiGainsFor(std::max(nd_est_[leader], 1));
  gains.kp *= run_.gain_multiplier;
  gains.ki *= run_.gain_multiplier;
  controllers_.insert_or_assign(
      leader, PiController(gains, PiController::kSetpoint - rim, q, run_.q_min, run_.q_max));
}

// A leader that has heard nobody has nothing to control and transmits at q_max.
void PacketRun::Lead(int leader, double rim, std::vector<double>& next) {
  if (nd_est_[leader] > 0) {
    StartController(leader, rim, next[leader]);
  } else {
    controllers_.erase(leader);
    next[leader] = run_.q_max;
  }
}

std::vector<NeighborView> PacketRun::KnownViews(int i) {
  std::vector<NeighborView> views;
  std::size_t k = know_.Begin(i);
  for (int j : g_.neighbors(i)) {
    if (know_.known[k]) views.push_back({j, know_.nd[k]});
    know_.nd_used[k] = know_.nd[k];
    ++k;
  }
  return views;
}

bool PacketRun::ViewsChanged(int i) const {
  const std::size_t b = know_.Begin(i);
  for (std::size_t k = b; k < b + g_.degree(i); ++k) {
    if (know_.nd[k] != know_.nd_used[k]) return true;
  }
  return false;
}

void PacketRun::Elect(int t, const std::vector<double>& rim, std::vector<double>& next) {
  for (int i = 0; i < n_; ++i) {
    const auto views = KnownViews(i);
    partition_.parent[i] = ChooseParent(i, nd_est_[i], views).value_or(kNoParent);
  }
  for (int p : partition_.RepairCycles()) {
    events_.push_back({t, EventKind::kCycleRepair, p, kNoParent});
  }
  elected_ = true;
  for (int l : partition_.leaders()) {
    events_.push_back({t, EventKind::kElection, l, kNoParent});
    Lead(l, rim[l], next);
  }
}

void PacketRun::RepairCycles(int t, const std::vector<double>& rim, std::vector<double>& next) {
  for (int p : partition_.RepairCycles()) {
    events_.push_back({t, EventKind::kCycleRepair, p, kNoParent});
    Lead(p, rim[p], next);
  }
}

void PacketRun::Reelect(int t, const std::vector<int>& changed,
                        const std::vector<double>& rim, std::vector<double>& next) {
  for (int i : changed) {
    const auto views = KnownViews(i);
    const int parent = ChooseParent(i, nd_est_[i], views).value_or(kNoParent);
    const bool was_leader = partition_.is_leader(i);
    partition_.parent[i] = parent;
    if (parent == kNoParent) {
      auto it = controllers_.find(i);
      if (!was_leader) {
        events_.push_back({t, EventKind::kReelection, i, kNoParent});
        Lead(i, rim[i], next);
      } else if (it != controllers_.end() && nd_est_[i] > 0) {
        // Same role, new degree: swap gains, keep integrator state.
        const double e_prev = it->second.e_prev();
        StartController(i, PiController::kSetpoint - e_prev, it->second.output());
      } else {
        Lead(i, rim[i], next);
      }
    } else if (was_leader) {
      events_.push_back({t, EventKind::kReelection, i, kNoParent});
      controllers_.erase(i);
    }
  }
  RepairCycles(t, rim, next);
}

RunTrace PacketRun::Run() {
  frame_.Validate();
  cfg_.Validate();
  const double frame_seconds = frame_.frame_seconds();
  const int frames_per_window = frame_.l_nd / frame_.l_f;

  RunTrace trace;
  trace.n_users = n_;
  trace.iteration_seconds = frame_seconds;

  if (cfg_.perfect_reception) {
    for (int i = 0; i < n_; ++i) nd_est_[i] = g_.degree(i);
    partition_ = ElectLeaders(g_);
    for (int l : partition_.leaders()) {
      if (g_.degree(l) == 0) q_[l] = run_.q_max;
    }
    DeliverAll();
    elected_ = true;
    for (int l : partition_.leaders()) {
      events_.push_back({0, EventKind::kElection, l, kNoParent});
      if (g_.degree(l) > 0) StartController(l, LocalRim(l), q_[l]);
    }
  }

  SlotOutcome slot;
  std::vector<long> successes(n_, 0);
  std::vector<long> measured(n_, 0);
  int measured_frames = 0;
  std::optional<int> converged_at;
  int last_frame = run_.max_iter;  // exclusive

  for (int t = 0; t < last_frame; ++t) {
    std::fill(know_.heard_frame.begin(), know_.heard_frame.end(), 0);
    std::fill(successes.begin(), successes.end(), 0);
    std::vector<std::uint16_t> map_code(n_);
    for (int i = 0; i < n_; ++i) map_code[i] = EncodeMap(q_[i]);

    for (int s = 0; s < frame_.l_f; ++s) {
      SimulateSlot(g_, q_, rng_, slot);
      for (int i = 0; i < n_; ++i) successes[i] += slot.success[i];
      if (cfg_.perfect_reception) continue;
      for (int j = 0; j < n_; ++j) {
        const int src = slot.heard_from[j];
        if (src < 0) continue;
        const std::size_t k = know_.Slot(j, src);
        know_.known[k] = 1;
        know_.map[k] = cfg_.quantize_map ? DecodeMap(map_code[src]) : q_[src];
        know_.nd[k] = HeaderNd(src);
        know_.heard_frame[k] = 1;
        if (!know_.heard_window[k]) {
          know_.heard_window[k] = 1;
          ++window_count_[j];
        }
      }
    }
    if (cfg_.perfect_reception) DeliverAll();

    std::vector<double> rim(n_);
    for (int i = 0; i < n_; ++i) rim[i] = LocalRim(i);

    TraceRow row;
    row.iteration = t;
    row.seconds = t * frame_seconds;
    row.q = q_;
    row.rim = rim;
    row.theta.resize(n_);
    for (int i = 0; i < n_; ++i) {
      row.theta[i] = static_cast<double>(successes[i]) / frame_.l_f;
    }
    for (const auto& [l, ctrl] : controllers_) row.leaders.push_back(l);

    std::vector<double> next = q_;
    if (elected_) {
      for (auto& [l, ctrl] : controllers_) next[l] = ctrl.Step(rim[l]);
      for (int j = 0; j < n_; ++j) {
        if (partition_.is_leader(j)) continue;
        const std::size_t k = know_.Slot(j, partition_.parent[j]);
        next[j] = know_.known[k] ? know_.map[k] : q_[j];
      }
      auto heard = [this](int listener, int sender) {
        return know_.heard_frame[know_.Slot(listener, sender)] != 0;
      };
      for (const Handover& h : ResolveDeclarations(g_, declare_, heard, partition_)) {
        StartController(h.winner, rim[h.winner], next[h.winner]);
        if (h.demoted.empty()) {
          events_.push_back({t, EventKind::kHandover, h.winner, kNoParent});
        }
        for (int l : h.demoted) {
          controllers_.erase(l);
          events_.push_back({t, EventKind::kHandover, h.winner, l});
        }
      }
      for (int i = 0; i < n_; ++i) {
        declare_[i] = rim[i] > PiController::kSetpoint + run_.declare_margin;
      }
    }

    if (!cfg_.perfect_reception && (t + 1) % frames_per_window == 0) {
      std::vector<int> changed;
      // The graph is static, so a lower count is a missed neighbor.
      for (int i = 0; i < n_; ++i) {
        if (window_count_[i] > nd_est_[i]) {
          changed.push_back(i);
          nd_est_[i] = window_count_[i];
        } else if (elected_ && ViewsChanged(i)) {
          changed.push_back(i);
        }
        window_count_[i] = 0;
      }
      std::fill(know_.heard_window.begin(), know_.heard_window.end(), 0);
      if (!elected_) {
        Elect(t, rim, next);
      } else if (!changed.empty()) {
        Reelect(t, changed, rim, next);
      }
    }

    row.declaring = declare_;
    trace.rows.push_back(std::move(row));
    q_ = std::move(next);

    if (converged_at) {
      for (int i = 0; i < n_; ++i) measured[i] += successes[i];
      ++measured_frames;
    } else if (WindowConverged(trace.rows, run_.tol, run_.window)) {
      converged_at = trace.rows[trace.rows.size() - run_.window].iteration;
      events_.push_back({*converged_at, EventKind::kConvergence, 0, kNoParent});
      last_frame = t + 1 + cfg_.measure_frames;
    }
  }

  trace.events = std::move(events_);
  trace.converged_at = converged_at;
  if (converged_at) {
    trace.outcome = RunOutcome::kConverged;
  } else if (LooksOscillating(trace.rows)) {
    trace.outcome = RunOutcome::kOscillating;
  }
  trace.measured_theta.assign(n_, 0.0);
  if (measured_frames > 0) {
    for (int i = 0; i < n_; ++i) {
      trace.measured_theta[i] =
          static_cast<double>(measured[i]) / (static_cast<double>(measured_frames) * frame_.l_f);
    }
  } else {
    // Not converged: average the tail of the run instead.
    const std::size_t tail = std::min<std::size_t>(
        trace.rows.size(), std::max(cfg_.measure_frames, 1));
    for (auto it = trace.rows.end() - tail; it != trace.rows.end(); ++it) {
      for (int i = 0; i < n_; ++i) trace.measured_theta[i] += it->theta[i] / tail;
    }
  }
  trace.final_q = q_;
  trace.final_partition = partition_;
  return trace;
}

}  // namespace

RunTrace RunFrames(const InterferenceGraph& g, const FrameConfig& frame,
                   const PacketRunConfig& cfg) {
  PacketRun run(g, frame, cfg);
  return run.Run();
}

}  // namespace sale
