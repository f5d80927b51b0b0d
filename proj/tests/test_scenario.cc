#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sale/scenario.h"

using namespace sale;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

Scenario Parse(const std::string& text, const std::string& base = ".") {
  std::istringstream in(text);
  return ParseScenario(in, base);
}

int ErrorLine(const std::string& text) {
  try {
    Parse(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path TempDir(const std::string& name) {
  auto d = fs::temp_directory_path() / ("sale_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("scenario defaults and keys") {
  auto s = Parse(
      "# packet run\n"
      "[topology]\n"
      "builtin = fig3\n"
      "[run]\n"
      "mode = packet\n"
      "gain_multiplier = 0.2   # conservative\n"
      "max_iter = 300\n"
      "[frame]\n"
      "l_f = 200\n"
      "l_nd = 2000\n"
      "[output]\n"
      "prefix = demo\n");
  CHECK(s.topology.kind == TopologySource::Kind::kBuiltin);
  CHECK(s.topology.name == "fig3");
  CHECK(s.mode == Mode::kPacket);
  CHECK(s.run.gain_multiplier == Approx(0.2));
  CHECK(s.run.max_iter == 300);
  CHECK(s.frame.l_f == 200);
  CHECK(s.prefix == "demo");
  auto r = s.EffectiveRun();
  CHECK(r.tol == Approx(0.05));
  CHECK(r.iteration_seconds == Approx(0.02));

  auto ideal = Parse("[run]\nmode = ideal\n");
  CHECK(ideal.EffectiveRun().tol == Approx(1e-3));
  auto tight = Parse("[run]\ntol = 1e-6\n");
  CHECK(tight.EffectiveRun().tol == Approx(1e-6));

  auto gen = Parse("[topology]\ngenerator = random_geometric\nn = 50\ndensity = 0.1\nseed = 4\n");
  CHECK(gen.topology.kind == TopologySource::Kind::kGenerated);
  CHECK(gen.topology.effective_area() == Approx(500.0));

  auto file = Parse("[topology]\nfile = nets/a.topo\n", "/cfg");
  CHECK(file.topology.path == "/cfg/nets/a.topo");
}

TEST_CASE("scenario parse errors carry the line number") {
  CHECK(ErrorLine("[run]\nmode = bursty\n") == 2);
  CHECK(ErrorLine("[run]\n\n# c\nmax_iter = ten\n") == 4);
  CHECK(ErrorLine("mode = ideal\n") == 1);
  CHECK(ErrorLine("[topology]\nbuiltin = fig9\n") == 2);
  CHECK(ErrorLine("[plot]\n") == 1);
  CHECK(ErrorLine("[run\n") == 1);
  CHECK(ErrorLine("[run]\nmode ideal\n") == 2);
  CHECK(ErrorLine("[run]\nexpect = maybe\n") == 2);
  CHECK(ErrorLine("[frame]\nslots = 3\n") == 2);
  CHECK(ErrorLine("[run]\nq_init = 0.05x\n") == 2);
  CHECK_THROWS_AS(LoadScenario("/nonexistent/scenario.cfg"), std::runtime_error);
}

TEST_CASE("builtin fig3 scenario in ideal mode") {
  auto s = Parse("[topology]\nbuiltin = fig3\n");
  auto res = RunScenario(s, false);
  CHECK(res.exit_code == 0);
  for (int i = 0; i < 6; ++i) CHECK(std::abs(res.trace.final_q[i] - 0.2) <= 1e-3);
  for (int i = 6; i < 9; ++i) CHECK(std::abs(res.trace.final_q[i] - 0.2598) <= 5e-4);
  CHECK(res.written.empty());
}

TEST_CASE("aggressive gains: nonzero exit unless divergence is expected") {
  auto s = Parse("[topology]\nbuiltin = fig5\n[run]\ngain_multiplier = 5\nmax_iter = 300\n");
  auto res = RunScenario(s, false);
  CHECK(res.trace.outcome == RunOutcome::kOscillating);
  CHECK(res.metrics.outcome == "oscillating");
  CHECK(res.exit_code != 0);
  CHECK_FALSE(res.metrics.d_pareto.has_value());
  s.expect_diverge = true;
  CHECK(RunScenario(s, false).exit_code == 0);
}

TEST_CASE("topology files load relative to the scenario") {
  auto dir = TempDir("file");
  {
    std::ofstream(dir / "chain.topo") << "n=3\n1 2\n2 3\n";
    std::ofstream(dir / "run.cfg") << "[topology]\nfile = chain.topo\n[output]\ndir = " << dir.string()
                                   << "\nprefix = chain\n";
  }
  auto s = LoadScenario((dir / "run.cfg").string());
  auto res = RunScenario(s, true);
  CHECK(res.graph.size() == 3);
  CHECK(res.exit_code == 0);
  CHECK(fs::exists(dir / "chain_trace.csv"));
  CHECK(fs::exists(dir / "chain_metrics.txt"));
  CHECK(fs::exists(dir / "chain_metrics.json"));

  std::ofstream(dir / "bad.topo") << "n=3\n1 2\n2 7\n";
  std::ofstream(dir / "bad.cfg") << "[topology]\nfile = bad.topo\n";
  auto bad = LoadScenario((dir / "bad.cfg").string());
  CHECK_THROWS_AS(RunScenario(bad, false), ParseError);
  fs::remove_all(dir);
}

TEST_CASE("identical scenario and seed give byte-identical traces") {
  auto dir = TempDir("repeat");
  auto s = Parse("[topology]\ngenerator = random_geometric\nn = 40\narea = 400\n[run]\nmode = packet\n"
                 "measure_frames = 20\n");
  s.SetSeed(9);
  s.out_dir = (dir / "a").string();
  RunScenario(s, true);
  s.out_dir = (dir / "b").string();
  RunScenario(s, true);
  const auto a = Slurp(dir / "a" / "sale_trace.csv");
  CHECK_FALSE(a.empty());
  CHECK(a == Slurp(dir / "b" / "sale_trace.csv"));
  CHECK(Slurp(dir / "a" / "sale_metrics.json") == Slurp(dir / "b" / "sale_metrics.json"));
  fs::remove_all(dir);
}

TEST_CASE("sweep over area includes the fully connected row") {
  // Start below 1/N so the dense case does not approach from above.
  auto s = Parse("[topology]\ngenerator = random_geometric\nn = 100\narea = 1000\n[run]\nq_init = 0.005\n");
  for (std::uint64_t seed : {1, 2, 3}) {
    s.SetSeed(seed);
    auto rows = Sweep(s, "area", {12.5, 1000.0}, false);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].metrics.leader_count == 1);
    CHECK(rows[0].metrics.max_height == 1);
    REQUIRE(rows[0].metrics.d_pareto.has_value());
    CHECK(*rows[0].metrics.d_pareto == Approx(1.0).epsilon(1e-3));
    CHECK(rows[1].metrics.leader_count > 1);
    CHECK(rows[0].users == 100);
    REQUIRE(rows[1].area.has_value());
    CHECK(*rows[1].area == Approx(1000.0));
  }
}

TEST_CASE("sweep over network size at fixed density") {
  auto s = Parse("[topology]\ngenerator = random_geometric\nn = 100\ndensity = 0.1\n");
  auto rows = Sweep(s, "n_users", {100, 200}, false);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].metrics.leader_count > rows[0].metrics.leader_count);
  for (const auto& r : rows) {
    REQUIRE(r.metrics.convergence_iterations.has_value());
    CHECK(*r.metrics.convergence_iterations <= 60);
  }
  std::ostringstream csv;
  WriteSweepCsv("n_users", rows, csv);
  const auto text = csv.str();
  CHECK(text.rfind("n_users,users,area,ud,", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
}

TEST_CASE("sweep edge cases") {
  auto s = Parse("[topology]\nbuiltin = fig5\n");
  CHECK(Sweep(s, "gain_multiplier", {}, false).empty());
  CHECK_THROWS_AS(Sweep(s, "temperature", {1.0}, false), std::invalid_argument);
  CHECK_THROWS_AS(Sweep(s, "n_users", {10}, false), std::invalid_argument);
  auto rows = Sweep(s, "gain_multiplier", {1.0, 0.2}, false);
  REQUIRE(rows.size() == 2);
  CHECK(*rows[1].metrics.convergence_iterations > *rows[0].metrics.convergence_iterations);
  std::ostringstream empty;
  WriteSweepCsv("seed", {}, empty);
  const auto header = empty.str();
  CHECK(std::count(header.begin(), header.end(), '\n') == 1);
}

TEST_CASE("sweep over l_f scales the frame") {
  auto s = Parse("[topology]\nbuiltin = fig5\n[run]\nmode = packet\nmeasure_frames = 20\n");
  auto rows = Sweep(s, "l_f", {100, 200}, false);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) CHECK(r.exit_code == 0);
  REQUIRE(rows[1].metrics.convergence_seconds.has_value());
  CHECK(*rows[1].metrics.convergence_seconds ==
        Approx(*rows[1].metrics.convergence_iterations * 0.02));
}
