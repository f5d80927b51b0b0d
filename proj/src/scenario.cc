#include "sale/scenario.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace sale {

Mode ParseMode(const std::string& s) {
  if (s == "ideal") return Mode::kIdeal;
  if (s == "packet") return Mode::kPacket;
  throw std::invalid_argument("mode must be 'ideal' or 'packet', got '" + s + "'");
}

const char* ModeName(Mode m) { return m == Mode::kIdeal ? "ideal" : "packet"; }

RunConfig Scenario::EffectiveRun() const {
  RunConfig r = run;
  r.tol = tol.value_or(mode == Mode::kIdeal ? 1e-3 : 0.05);
  if (mode == Mode::kPacket) r.iteration_seconds = frame.frame_seconds();
  return r;
}

void Scenario::SetSeed(std::uint64_t seed) {
  frame.seed = seed;
  topology.seed = seed;
}

namespace {

std::string Trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double ToDouble(const std::string& v, int line) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw ParseError(line, "expected a number, got '" + v + "'");
  return out;
}

long long ToInt(const std::string& v, int line) {
  std::size_t used = 0;
  long long out = 0;
  try {
    out = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw ParseError(line, "expected an integer, got '" + v + "'");
  return out;
}

bool ToBool(const std::string& v, int line) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ParseError(line, "expected true/false, got '" + v + "'");
}

void Apply(Scenario& s, const std::string& section, const std::string& key,
           const std::string& v, int line, const std::string& base_dir) {
  auto& t = s.topology;
  if (section == "topology") {
    if (key == "builtin") {
      t.kind = TopologySource::Kind::kBuiltin;
      t.name = v;
      const auto names = BuiltinTopologyNames();
      if (std::find(names.begin(), names.end(), v) == names.end()) {
        throw ParseError(line, "unknown builtin topology '" + v + "'");
      }
    } else if (key == "file") {
      t.kind = TopologySource::Kind::kFile;
      std::filesystem::path p(v);
      t.path = p.is_absolute() ? v : (std::filesystem::path(base_dir) / p).string();
    } else if (key == "generator") {
      if (v != "random_geometric") throw ParseError(line, "unknown generator '" + v + "'");
      t.kind = TopologySource::Kind::kGenerated;
    } else if (key == "n") {
      t.n = static_cast<int>(ToInt(v, line));
    } else if (key == "area") {
      t.area = ToDouble(v, line);
    } else if (key == "density") {
      t.density = ToDouble(v, line);
    } else if (key == "range") {
      t.range = ToDouble(v, line);
    } else if (key == "seed") {
      t.seed = static_cast<std::uint64_t>(ToInt(v, line));
    } else {
      throw ParseError(line, "unknown key '" + key + "' in [topology]");
    }
  } else if (section == "run") {
    auto& r = s.run;
    if (key == "mode") {
      try {
        s.mode = ParseMode(v);
      } catch (const std::invalid_argument& e) {
        throw ParseError(line, e.what());
      }
    } else if (key == "q_init") {
      r.q_init = ToDouble(v, line);
    } else if (key == "tol") {
      s.tol = ToDouble(v, line);
    } else if (key == "window") {
      r.window = static_cast<int>(ToInt(v, line));
    } else if (key == "max_iter") {
      r.max_iter = static_cast<int>(ToInt(v, line));
    } else if (key == "gain_multiplier") {
      r.gain_multiplier = ToDouble(v, line);
    } else if (key == "q_min") {
      r.q_min = ToDouble(v, line);
    } else if (key == "q_max") {
      r.q_max = ToDouble(v, line);
    } else if (key == "declare_margin") {
      r.declare_margin = ToDouble(v, line);
    } else if (key == "iteration_seconds") {
      r.iteration_seconds = ToDouble(v, line);
    } else if (key == "measure_frames") {
      s.measure_frames = static_cast<int>(ToInt(v, line));
    } else if (key == "perfect_reception") {
      s.perfect_reception = ToBool(v, line);
    } else if (key == "quantize_map") {
      s.quantize_map = ToBool(v, line);
    } else if (key == "expect") {
      if (v == "converge") {
        s.expect_diverge = false;
      } else if (v == "diverge") {
        s.expect_diverge = true;
      } else {
        throw ParseError(line, "expect must be 'converge' or 'diverge'");
      }
    } else {
      throw ParseError(line, "unknown key '" + key + "' in [run]");
    }
  } else if (section == "frame") {
    auto& f = s.frame;
    if (key == "l_f") {
      f.l_f = static_cast<int>(ToInt(v, line));
    } else if (key == "l_nd") {
      f.l_nd = static_cast<int>(ToInt(v, line));
    } else if (key == "l_s") {
      f.l_s = static_cast<int>(ToInt(v, line));
    } else if (key == "header_overhead_bits") {
      f.header_overhead_bits = static_cast<int>(ToInt(v, line));
    } else if (key == "r_b") {
      f.r_b = ToDouble(v, line);
    } else if (key == "seed") {
      f.seed = static_cast<std::uint64_t>(ToInt(v, line));
    } else {
      throw ParseError(line, "unknown key '" + key + "' in [frame]");
    }
  } else if (section == "metrics") {
    if (key == "conv_tol") {
      s.metrics.conv_tol = ToDouble(v, line);
    } else if (key == "conv_window") {
      s.metrics.conv_window = static_cast<int>(ToInt(v, line));
    } else if (key == "pareto") {
      s.metrics.with_pareto = ToBool(v, line);
    } else {
      throw ParseError(line, "unknown key '" + key + "' in [metrics]");
    }
  } else if (section == "output") {
    if (key == "dir") {
      s.out_dir = v;
    } else if (key == "prefix") {
      s.prefix = v;
    } else {
      throw ParseError(line, "unknown key '" + key + "' in [output]");
    }
  } else {
    throw ParseError(line, "key outside of a known section");
  }
}

}  // namespace

Scenario ParseScenario(std::istream& in, const std::string& base_dir) {
  Scenario s;
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    const std::string text = Trim(raw);
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') throw ParseError(line, "unterminated section header");
      section = Trim(text.substr(1, text.size() - 2));
      static const char* kSections[] = {"topology", "run", "frame", "metrics", "output"};
      if (std::find(std::begin(kSections), std::end(kSections), section) == std::end(kSections)) {
        throw ParseError(line, "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ParseError(line, "expected 'key = value'");
    const std::string key = Trim(text.substr(0, eq));
    const std::string value = Trim(text.substr(eq + 1));
    if (key.empty() || value.empty()) throw ParseError(line, "expected 'key = value'");
    Apply(s, section, key, value, line, base_dir);
  }
  return s;
}

Scenario LoadScenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario '" + path + "'");
  const auto dir = std::filesystem::path(path).parent_path();
  return ParseScenario(in, dir.empty() ? "." : dir.string());
}

InterferenceGraph BuildTopology(const TopologySource& src) {
  switch (src.kind) {
    case TopologySource::Kind::kBuiltin: return BuiltinTopology(src.name);
    case TopologySource::Kind::kFile: return ReadTopologyFile(src.path);
    case TopologySource::Kind::kGenerated:
      return RandomGeometric(src.n, src.effective_area(), src.range, src.seed);
  }
  throw std::logic_error("unhandled topology source");
}

ScenarioResult RunScenario(const Scenario& s, bool write_files) {
  ScenarioResult result{BuildTopology(s.topology), {}, {}, 0, {}};
  const RunConfig run = s.EffectiveRun();
  if (s.mode == Mode::kIdeal) {
    result.trace = RunIdeal(result.graph, run);
  } else {
    PacketRunConfig pc;
    pc.run = run;
    pc.measure_frames = s.measure_frames;
    pc.perfect_reception = s.perfect_reception;
    pc.quantize_map = s.quantize_map;
    result.trace = RunFrames(result.graph, s.frame, pc);
  }
  MetricsOptions opts = s.metrics;
  // A diverging run has no meaningful operating point to push outward from.
  if (!result.trace.converged()) opts.with_pareto = false;
  result.metrics = ComputeMetrics(result.graph, result.trace, s.frame, opts);
  result.metrics.mode = ModeName(s.mode);

  const bool converged = result.trace.converged();
  result.exit_code = converged != s.expect_diverge ? 0 : 1;

  if (write_files) {
    std::filesystem::create_directories(s.out_dir);
    const auto base = std::filesystem::path(s.out_dir) / s.prefix;
    const std::string trace_path = base.string() + "_trace.csv";
    WriteTraceCsv(result.trace, trace_path);
    const std::string txt_path = base.string() + "_metrics.txt";
    const std::string json_path = base.string() + "_metrics.json";
    std::ofstream(txt_path) << FormatMetrics(result.metrics);
    std::ofstream(json_path) << MetricsJson(result.metrics);
    result.written = {trace_path, txt_path, json_path};
  }
  return result;
}

const std::vector<std::string>& SweepAxes() {
  static const std::vector<std::string> axes = {"n_users", "area", "seed", "gain_multiplier",
                                                "l_f"};
  return axes;
}

namespace {

std::string ValueTag(double v) {
  std::ostringstream out;
  out << v;
  std::string s = out.str();
  std::replace(s.begin(), s.end(), '.', 'p');
  return s;
}

Scenario WithAxis(const Scenario& base, const std::string& axis, double v) {
  Scenario s = base;
  const bool integral = std::floor(v) == v;
  if (axis == "n_users") {
    if (s.topology.kind != TopologySource::Kind::kGenerated || !integral || v < 1) {
      throw std::invalid_argument("n_users sweep needs a generated topology and integer values");
    }
    s.topology.n = static_cast<int>(v);
  } else if (axis == "area") {
    if (s.topology.kind != TopologySource::Kind::kGenerated) {
      throw std::invalid_argument("area sweep needs a generated topology");
    }
    s.topology.area = v;
    s.topology.density.reset();
  } else if (axis == "seed") {
    if (!integral || v < 0) throw std::invalid_argument("seed values must be nonnegative integers");
    s.SetSeed(static_cast<std::uint64_t>(v));
  } else if (axis == "gain_multiplier") {
    s.run.gain_multiplier = v;
  } else if (axis == "l_f") {
    if (!integral || v < 1) throw std::invalid_argument("l_f values must be positive integers");
    s.frame.l_f = static_cast<int>(v);
    s.frame.l_nd = 10 * s.frame.l_f;
  } else {
    throw std::invalid_argument("unknown sweep axis '" + axis + "'");
  }
  s.prefix = base.prefix + "_" + axis + "_" + ValueTag(v);
  return s;
}

}  // namespace

std::vector<SweepRow> Sweep(const Scenario& base, const std::string& axis,
                            const std::vector<double>& values, bool write_files) {
  const auto& axes = SweepAxes();
  if (std::find(axes.begin(), axes.end(), axis) == axes.end()) {
    throw std::invalid_argument("unknown sweep axis '" + axis + "'");
  }
  std::vector<Scenario> scenarios;
  for (double v : values) scenarios.push_back(WithAxis(base, axis, v));

  std::vector<SweepRow> rows(values.size());
  const std::size_t workers =
      std::max<std::size_t>(1, std::thread::hardware_concurrency());
  for (std::size_t start = 0; start < scenarios.size(); start += workers) {
    const std::size_t stop = std::min(scenarios.size(), start + workers);
    std::vector<std::future<ScenarioResult>> batch;
    for (std::size_t k = start; k < stop; ++k) {
      batch.push_back(std::async(std::launch::async, [&scenarios, k, write_files] {
        return RunScenario(scenarios[k], write_files);
      }));
    }
    for (std::size_t k = start; k < stop; ++k) {
      ScenarioResult r = batch[k - start].get();
      SweepRow& row = rows[k];
      row.value = values[k];
      row.users = r.graph.size();
      if (scenarios[k].topology.kind == TopologySource::Kind::kGenerated) {
        row.area = scenarios[k].topology.effective_area();
      }
      row.metrics = std::move(r.metrics);
      row.exit_code = r.exit_code;
    }
  }
  return rows;
}

void WriteSweepCsv(const std::string& axis, const std::vector<SweepRow>& rows,
                   std::ostream& out) {
  out << axis << ",users,area,ud,sum_theta,mean_theta,mean_net_theta,jain,d_pareto,"
                 "t_conv_iterations,t_conv_seconds,leaders,max_h,outcome\n";
  out << std::setprecision(6);
  for (const auto& r : rows) {
    const auto& m = r.metrics;
    out << r.value << ',' << r.users << ',';
    if (r.area) out << *r.area;
    out << ',';
    if (r.area) out << r.users / *r.area;
    out << ',' << m.total_theta << ',' << m.mean_theta << ',' << m.mean_net_theta << ','
        << m.jain << ',';
    if (m.d_pareto) out << *m.d_pareto;
    out << ',';
    if (m.convergence_iterations) out << *m.convergence_iterations;
    out << ',';
    if (m.convergence_seconds) out << *m.convergence_seconds;
    out << ',' << m.leader_count << ',' << m.max_height << ',' << m.outcome << '\n';
  }
}

}  // namespace sale
