// Acceptance run: one PASS/FAIL line per criterion, followed by indented
// detail lines. Exit status is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "properties.h"
#include "sale/analysis.h"
#include "sale/metrics.h"
#include "sale/protocol.h"
#include "sale/simnet.h"

using namespace sale;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void Expect(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back(std::string(ok ? "ok   " : "MISS ") + what);
  }
};

std::string Fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double MaxOf(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

Outcome CompleteOptimum() {
  Outcome o;
  for (int n : {2, 5, 10, 100}) {
    auto g = CompleteGraph(n);
    auto tr = RunIdeal(g, RunConfig{});
    double dev = 0.0;
    for (double q : tr.final_q) dev = std::max(dev, std::abs(q - 1.0 / n));
    const double det = analysis::JacobianDet(g, std::vector<double>(n, 1.0 / n));
    o.Expect(tr.converged() && dev <= 1e-4,
             Fmt("N=%g converged, max |q - 1/N| = %.2e (<= 1e-4)", n, dev));
    o.Expect(std::abs(det) <= 1e-9, Fmt("N=%g D(1/N) = %.2e (|.| <= 1e-9)", n, det));
  }
  return o;
}

Outcome NineUserSteadyState() {
  Outcome o;
  auto g = BuiltinTopology("fig3");
  auto tr = RunIdeal(g, RunConfig{});
  o.Expect(tr.converged(), "ideal run converged");
  o.Expect(std::abs(tr.final_q[0] - 0.2) <= 1e-3, Fmt("tree-1 MAP %.5f (0.200 +- 1e-3)", tr.final_q[0]));
  o.Expect(std::abs(tr.final_q[6] - 0.2598) <= 5e-4, Fmt("tree-7 MAP %.5f (0.2598 +- 5e-4)", tr.final_q[6]));
  return o;
}

Outcome TenUserHandover() {
  Outcome o;
  auto g = BuiltinTopology("fig5");
  auto pk = RunFrames(g, FrameConfig{}, PacketRunConfig{});
  o.Expect(pk.converged(), "packet run converged");
  o.Expect(pk.HasHandover(6, 7), "packet run logs handover 7 -> 8");
  auto r = analysis::Rims(g, pk.final_q);
  o.Expect(std::abs(r[7] - 2.0) <= 0.05, Fmt("packet R_8 = %.4f (2 +- 0.05)", r[7]));
  o.Expect(std::abs(r[6] - 1.91) <= 0.03, Fmt("packet R_7 = %.4f (1.91 +- 0.03)", r[6]));
  double dev = 0.0;
  for (int i = 6; i < 10; ++i) dev = std::max(dev, std::abs(pk.final_q[i] - 0.25));
  o.Expect(dev <= 0.005, Fmt("packet tree-8 MAP max |q - 0.25| = %.5f (<= 0.005)", dev));

  auto id = RunIdeal(g, RunConfig{});
  o.Expect(id.converged() && id.HasHandover(6, 7), "ideal run hands over 7 -> 8 and converges");
  auto steady = analysis::SolveSteadyState(g, id.final_partition);
  double idev = 0.0;
  for (int i = 0; i < 10; ++i) idev = std::max(idev, std::abs(id.final_q[i] - steady[i]));
  for (int i = 6; i < 10; ++i) idev = std::max(idev, std::abs(id.final_q[i] - 0.25));
  o.Expect(idev <= 1e-3, Fmt("ideal steady state deviation %.2e (<= 1e-3)", idev));
  return o;
}

Outcome TenUserMetrics() {
  Outcome o;
  auto g = BuiltinTopology("fig5");
  FrameConfig frame;
  auto tr = RunFrames(g, frame, PacketRunConfig{});
  auto m = ComputeMetrics(g, tr, frame);
  o.Expect(std::abs(m.total_theta - 1.246) <= 0.02 * 1.246, Fmt("sum theta %.4f (1.246 +- 2%%)", m.total_theta));
  o.Expect(std::abs(m.jain - 0.9921) <= 0.005, Fmt("jain %.4f (0.9921 +- 0.005)", m.jain));
  const double d = m.d_pareto.value_or(NAN);
  o.Expect(std::abs(d - 1.02) <= 0.01, Fmt("d_pareto %.4f (1.02 +- 0.01)", d));
  o.Expect(std::abs(m.mean_net_theta - 0.1230) <= 0.02 * 0.1230,
           Fmt("mean net theta %.5f (0.1230 +- 2%%)", m.mean_net_theta));
  return o;
}

Outcome GainRegimes() {
  Outcome o;
  auto g = BuiltinTopology("fig5");
  auto r1_time = [&](double mult) -> std::optional<int> {
    RunConfig cfg;
    cfg.gain_multiplier = mult;
    auto tr = RunIdeal(g, cfg);
    return ConvergenceTime(tr.RimSeries(0), 0.05, 5);
  };
  auto base = r1_time(1.0);
  auto slow = r1_time(0.2);
  o.Expect(base && *base <= 30, Fmt("paper gains: R_1 settles at iteration %g (<= 30)", base ? *base : -1));
  o.Expect(base && slow && *slow >= 3 * *base,
           Fmt("gains/5: R_1 settles at iteration %g (>= 3 x %g)", slow ? *slow : -1, base ? *base : -1));

  const int n1 = g.degree(0);
  auto gains = PiGainsFor(n1);
  o.Expect(!analysis::PiStabilityCheck(n1, 5 * gains.kp, 5 * gains.ki), "gains x5 fail the stability check");
  RunConfig hot;
  hot.gain_multiplier = 5.0;
  hot.max_iter = 400;
  auto tr = RunIdeal(g, hot);
  auto r1 = tr.RimSeries(0);
  double swing = 0.0;
  for (std::size_t t = r1.size() >= 50 ? r1.size() - 50 : 0; t < r1.size(); ++t) {
    swing = std::max(swing, std::abs(r1[t] - 2.0));
  }
  o.Expect(!tr.converged() && swing > 0.5, Fmt("gains x5: max |R_1 - 2| over last 50 = %.3f (> 0.5)", swing));
  return o;
}

Outcome MonteCarlo() {
  Outcome o;
  auto g = BuiltinTopology("fig1");
  std::vector<double> q{0.5, 0.5, 0.5};
  std::mt19937_64 rng(20160125);
  const long slots = 1000000;
  std::vector<long> wins(3, 0);
  SlotOutcome s;
  for (long k = 0; k < slots; ++k) {
    SimulateSlot(g, q, rng, s);
    for (int i = 0; i < 3; ++i) wins[i] += s.success[i];
  }
  const double want[3] = {0.25, 0.125, 0.25};
  for (int i = 0; i < 3; ++i) {
    const double rate = static_cast<double>(wins[i]) / slots;
    const double sigma = std::sqrt(want[i] * (1 - want[i]) / slots);
    o.Expect(std::abs(rate - want[i]) <= 3 * sigma,
             Fmt("user %g: rate %.5f", i + 1, rate) + Fmt(" vs %.3f (3 sigma = %.5f)", want[i], 3 * sigma));
  }
  return o;
}

Outcome Scalability() {
  Outcome o;
  FrameConfig frame;
  auto check = [&](int n, std::uint64_t seed) {
    auto g = RandomGeometric(n, n / 0.1, 5.0, seed);
    FrameConfig f = frame;
    f.seed = seed;
    auto tr = RunFrames(g, f, PacketRunConfig{});
    auto m = ComputeMetrics(g, tr, f);
    const double rmax = MaxOf(analysis::Rims(g, tr.final_q));
    const int conv = m.convergence_iterations.value_or(-1);
    std::ostringstream tag;
    tag << "N=" << n << " seed " << seed << ": ";
    o.Expect(tr.converged() && conv >= 0 && conv <= 60, tag.str() + Fmt("convergence %g iterations (<= 60)", conv));
    if (n == 100) {
      const double d = m.d_pareto.value_or(NAN);
      o.Expect(d <= 1.10, tag.str() + Fmt("d_pareto %.4f (<= 1.10)", d));
      o.Expect(m.jain >= 0.95, tag.str() + Fmt("jain %.4f (>= 0.95)", m.jain));
      o.Expect(rmax <= 2.001, tag.str() + Fmt("max R_i %.5f (<= 2.001)", rmax));
    }
  };
  for (std::uint64_t seed = 1; seed <= 5; ++seed) check(100, seed);
  const auto t0 = std::chrono::steady_clock::now();
  check(400, 1);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.Expect(secs < 120.0, Fmt("N=400 run took %.2f s (< 120)", secs));
  return o;
}

Outcome Properties() {
  Outcome o;
  auto run = [&](const char* what, const std::string& res) {
    o.Expect(res.empty(), res.empty() ? std::string(what) : std::string(what) + ": " + res);
  };
  run("RIM < 2 implies positive definite C (1000 samples)", props::RimImpliesPositiveDefinite(1000, 1));
  run("regular-graph tangency", props::RegularTangency());
  run("monotone best-response iteration", props::MonotoneNash(300, 3));
  run("sensitivity sign change, n = 1..50", props::SensitivitySignChange());
  run("|K'| < |K|, n = 2..20", props::AffectedGainBelowLeaderGain());
  run("perturbation return", props::PerturbationReturn());
  run("packet vs ideal within 0.005", props::PacketMatchesIdeal(0.005));
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Outcome()> body;
};

}  // namespace

int main() {
  const std::vector<Criterion> all{
      {1, "complete-graph optimum", 1.0, CompleteOptimum},
      {2, "nine-user steady state", 1.0, NineUserSteadyState},
      {3, "ten-user handover and steady state", 5.0, TenUserHandover},
      {4, "ten-user throughput metrics", 10.0, TenUserMetrics},
      {5, "gain regimes", 5.0, GainRegimes},
      {6, "Monte-Carlo slot success", 10.0, MonteCarlo},
      {7, "scalability bounds", 120.0 + 60.0, Scalability},
      {8, "property suites", 60.0, Properties},
  };
  int failed = 0;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o.Expect(false, std::string("threw: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.Expect(secs < c.limit_seconds, Fmt("runtime %.3f s (< %g s)", secs, c.limit_seconds));
    std::printf("%s %d %s (%.3f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs);
    for (const auto& n : o.notes) std::printf("    %s\n", n.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed;
}
