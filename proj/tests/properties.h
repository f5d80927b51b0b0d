#pragma once

// Property checks shared by the doctest suite and the acceptance binary.
// Each returns an empty string on success, otherwise a short description of
// the first counterexample.

#include <cstdint>
#include <string>

namespace props {

// Random graphs with N <= 8 and random MAPs; `samples` draws with max RIM < 2.
std::string RimImpliesPositiveDefinite(int samples, std::uint64_t seed);

// Cycles and complete graphs on k = 2..6 users at q = 1/(d+1).
std::string RegularTangency();

// Best-response iterates never decrease in any coordinate.
std::string MonotoneNash(int samples, std::uint64_t seed);

// d theta / d eps changes sign at eps = 0 for n = 1..50.
std::string SensitivitySignChange();

// |K'| < |K| for n = 2..20 over a grid of q_m in [0, 1/(n+1)].
std::string AffectedGainBelowLeaderGain();

// +-1% MAP perturbations at the steady state of the builtin topologies die out.
std::string PerturbationReturn();

// Packet-mode final MAPs within `tol` of the ideal-mode ones.
std::string PacketMatchesIdeal(double tol);

}  // namespace props
