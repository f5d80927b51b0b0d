#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "sale/protocol.h"
#include "sale/topology.h"
#include "sale/trace.h"

// Slot-level slotted-Aloha simulator carrying the SALE header subfields.
// Every SALE iteration is one frame of l_f slots; users act only on headers
// they actually received.
namespace sale {

struct FrameConfig {
  int l_f = 100;                  // slots per frame (one SALE iteration)
  int l_nd = 1000;                // slots per ND estimation window
  int l_s = 2000;                 // packet size, bits
  int header_overhead_bits = 25;  // ND 8 + MAP 16 + declare 1
  double r_b = 20e6;              // channel bit rate, bits/s
  std::uint64_t seed = 1;

  double slot_seconds() const { return l_s / r_b; }
  double frame_seconds() const { return l_f * slot_seconds(); }
  void Validate() const;
};

inline constexpr int kNdBits = 8;
inline constexpr int kMapBits = 16;
inline constexpr int kDeclareBits = 1;

std::uint16_t EncodeMap(double q);
double DecodeMap(std::uint16_t code);

struct PacketHeader {
  int sender = 0;
  std::uint8_t nd = 0;
  std::uint16_t map = 0;
  bool declare = false;

  // 25-bit layout: nd << 17 | map << 1 | declare.
  std::uint32_t Pack() const;
  static PacketHeader Unpack(int sender, std::uint32_t bits);
};

struct SlotOutcome {
  std::vector<char> transmitted;
  std::vector<char> success;     // transmitted and no neighbor transmitted
  std::vector<int> heard_from;   // sender received this slot, or -1
};

// Each user transmits with probability q_i (uniform draw < q_i, users in
// index order). A listener hears i iff exactly one of its neighbors, i,
// transmitted.
SlotOutcome SimulateSlot(const InterferenceGraph& g, std::span<const double> q,
                         std::mt19937_64& rng);
void SimulateSlot(const InterferenceGraph& g, std::span<const double> q,
                  std::mt19937_64& rng, SlotOutcome& out);

// Number of distinct senders heard in one ND window.
int EstimateNd(std::span<const int> heard_senders);

struct PacketRunConfig {
  RunConfig run = DefaultRun();
  int measure_frames = 500;       // frames after convergence used for empirical theta
  bool perfect_reception = false; // deliver every header every frame, true degrees
  bool quantize_map = true;

  static RunConfig DefaultRun() {
    RunConfig r;
    r.tol = 0.05;
    return r;
  }
  void Validate() const;
};

RunTrace RunFrames(const InterferenceGraph& g, const FrameConfig& frame,
                   const PacketRunConfig& cfg);

}  // namespace sale
