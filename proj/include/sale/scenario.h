#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "sale/metrics.h"
#include "sale/protocol.h"
#include "sale/simnet.h"
#include "sale/topology.h"

namespace sale {

enum class Mode { kIdeal, kPacket };

Mode ParseMode(const std::string& s);
const char* ModeName(Mode m);

struct TopologySource {
  enum class Kind { kBuiltin, kFile, kGenerated };
  Kind kind = Kind::kBuiltin;
  std::string name = "fig5";  // builtin
  std::string path;           // file, resolved against the config's directory
  int n = 100;
  double area = 1000.0;
  std::optional<double> density;  // users per unit area; overrides area when set
  double range = 5.0;
  std::uint64_t seed = 1;

  double effective_area() const { return density ? n / *density : area; }
};

struct Scenario {
  TopologySource topology;
  Mode mode = Mode::kIdeal;
  RunConfig run;
  std::optional<double> tol;  // unset: 1e-3 ideal, 0.05 packet
  FrameConfig frame;
  int measure_frames = 500;
  bool perfect_reception = false;
  bool quantize_map = true;
  bool expect_diverge = false;
  MetricsOptions metrics;
  std::string out_dir = ".";
  std::string prefix = "sale";

  RunConfig EffectiveRun() const;
  void SetSeed(std::uint64_t seed);
};

// Sections [topology], [run], [frame], [metrics], [output]; "key = value"
// lines; '#' comments. Throws ParseError with the offending line.
Scenario ParseScenario(std::istream& in, const std::string& base_dir = ".");
Scenario LoadScenario(const std::string& path);

InterferenceGraph BuildTopology(const TopologySource& src);

struct ScenarioResult {
  InterferenceGraph graph;
  RunTrace trace;
  MetricsReport metrics;
  int exit_code = 0;
  std::vector<std::string> written;
};

// Runs one scenario; with write_files, emits <prefix>_trace.csv,
// <prefix>_metrics.txt and <prefix>_metrics.json under out_dir.
ScenarioResult RunScenario(const Scenario& s, bool write_files = true);

struct SweepRow {
  double value = 0.0;
  int users = 0;
  std::optional<double> area;
  MetricsReport metrics;
  int exit_code = 0;
};

const std::vector<std::string>& SweepAxes();

// One run per value, executed concurrently. Throws std::invalid_argument for
// an unknown axis.
std::vector<SweepRow> Sweep(const Scenario& base, const std::string& axis,
                            const std::vector<double>& values, bool write_files = true);

// users, area, ud, sum_theta, jain, d_pareto, t_conv, leaders, max_h, ...
void WriteSweepCsv(const std::string& axis, const std::vector<SweepRow>& rows,
                   std::ostream& out);

}  // namespace sale
