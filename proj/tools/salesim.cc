// salesim: run SALE scenarios, parameter sweeps and topology generation.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sale/scenario.h"
#include "sale/topology.h"

namespace {

struct Overrides {
  std::string mode;
  long long seed = -1;
  std::string out_dir;
};

void ApplyOverrides(sale::Scenario& s, const Overrides& o) {
  if (!o.mode.empty()) s.mode = sale::ParseMode(o.mode);
  if (o.seed >= 0) s.SetSeed(static_cast<std::uint64_t>(o.seed));
  if (!o.out_dir.empty()) s.out_dir = o.out_dir;
}

std::vector<double> ParseValues(const std::string& csv) {
  std::vector<double> out;
  std::stringstream in(csv);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad sweep value '" + item + "'");
    out.push_back(v);
  }
  return out;
}

int CmdRun(const std::string& config, const Overrides& o) {
  sale::Scenario s = sale::LoadScenario(config);
  ApplyOverrides(s, o);
  const auto result = sale::RunScenario(s);
  std::cout << sale::FormatMetrics(result.metrics);
  for (const auto& path : result.written) std::cerr << "wrote " << path << "\n";
  if (result.exit_code != 0) {
    std::cerr << "run outcome '" << result.metrics.outcome << "' "
              << (s.expect_diverge ? "but divergence was expected" : "(did not converge)")
              << "\n";
  }
  return result.exit_code;
}

int CmdSweep(const std::string& config, const std::string& axis, const std::string& values,
             const Overrides& o) {
  sale::Scenario s = sale::LoadScenario(config);
  ApplyOverrides(s, o);
  const auto rows = sale::Sweep(s, axis, ParseValues(values));
  std::filesystem::create_directories(s.out_dir);
  const auto path = (std::filesystem::path(s.out_dir) / (s.prefix + "_sweep_" + axis + ".csv"));
  std::ofstream out(path);
  sale::WriteSweepCsv(axis, rows, out);
  sale::WriteSweepCsv(axis, rows, std::cout);
  std::cerr << "wrote " << path.string() << "\n";
  int status = 0;
  for (const auto& r : rows) status |= r.exit_code;
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SALE spatial Aloha simulator"};
  app.require_subcommand(1);

  Overrides o;
  auto add_overrides = [&o](CLI::App* cmd) {
    cmd->add_option("--mode", o.mode, "ideal or packet")
        ->check(CLI::IsMember({"ideal", "packet"}));
    cmd->add_option("--seed", o.seed, "RNG seed for topology generation and slots");
    cmd->add_option("--out-dir", o.out_dir, "directory for traces and reports");
  };

  std::string config;
  auto* run = app.add_subcommand("run", "run one scenario");
  run->add_option("config", config, "scenario file")->required()->check(CLI::ExistingFile);
  add_overrides(run);

  std::string axis, values;
  auto* sweep = app.add_subcommand("sweep", "run a scenario over one parameter axis");
  sweep->add_option("config", config, "scenario file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--axis", axis, "n_users, area, seed, gain_multiplier or l_f")->required();
  sweep->add_option("--values", values, "comma-separated values")->required();
  add_overrides(sweep);

  int n = 100;
  double area = 1000.0, range = 5.0;
  std::uint64_t seed = 1;
  std::string out;
  auto* gen = app.add_subcommand("gen-topology", "write a random connected topology");
  gen->add_option("--n", n, "user count")->required();
  gen->add_option("--area", area, "square area")->required();
  gen->add_option("--range", range, "transmission range")->default_val(5.0);
  gen->add_option("--seed", seed, "RNG seed")->default_val(1);
  gen->add_option("--out", out, "output file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return CmdRun(config, o);
    if (*sweep) return CmdSweep(config, axis, values, o);
    if (*gen) {
      const auto g = sale::RandomGeometric(n, area, range, seed);
      sale::WriteTopologyFile(g, out);
      std::cerr << "wrote " << out << " (" << g.size() << " users, " << g.edge_count()
                << " edges)\n";
      return 0;
    }
  } catch (const sale::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
