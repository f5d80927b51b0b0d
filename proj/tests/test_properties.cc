#include <doctest.h>

#include <algorithm>

#include "properties.h"
#include "sale/analysis.h"
#include "sale/protocol.h"
#include "sale/simnet.h"

using namespace sale;

TEST_CASE("rim below 2 implies a stable equilibrium") {
  CHECK(props::RimImpliesPositiveDefinite(1000, 1) == "");
}

TEST_CASE("regular graphs touch the front at rim 2") { CHECK(props::RegularTangency() == ""); }

TEST_CASE("best response iterates are monotone") { CHECK(props::MonotoneNash(300, 3) == ""); }

TEST_CASE("leader throughput peaks at rim 2") { CHECK(props::SensitivitySignChange() == ""); }

TEST_CASE("affected leaders see a smaller plant gain") {
  CHECK(props::AffectedGainBelowLeaderGain() == "");
}

TEST_CASE("small perturbations return to the steady state") {
  CHECK(props::PerturbationReturn() == "");
}

TEST_CASE("packet and ideal steady states agree") { CHECK(props::PacketMatchesIdeal(0.005) == ""); }

TEST_CASE("default gains are stable for every degree, five-fold gains are not") {
  for (int n = 1; n <= 400; ++n) {
    auto g = PiGainsFor(n);
    CHECK(analysis::PiStabilityCheck(n, g.kp, g.ki));
    CHECK_FALSE(analysis::PiStabilityCheck(n, 5 * g.kp, 5 * g.ki));
  }
}

TEST_CASE("converged random networks keep every rim at or below 2 + tol") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto g = RandomGeometric(60, 600.0, 5.0, seed);
    RunConfig cfg;
    auto trace = RunIdeal(g, cfg);
    REQUIRE(trace.converged());
    auto rim = analysis::Rims(g, trace.final_q);
    CHECK(*std::max_element(rim.begin(), rim.end()) <= 2.0 + cfg.declare_margin);
    trace.final_partition.Validate(g);
  }
}
