#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mphase/cli/cli.hpp"
#include "mphase/feeder/parser.hpp"
#include "mphase/losses/losses.hpp"
#include "oracle.hpp"

using namespace mphase;
using testing::fixture;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "mphase-opf");
  std::vector<const char*> argv;
  for (const auto& a : args)
    argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> rows(const std::string& csv) {
  std::vector<std::vector<std::string>> out;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ','))
      cells.push_back(cell);
    if (!line.empty() && line.back() == ',')
      cells.emplace_back();
    out.push_back(cells);
  }
  return out;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mphase_cli_test_" + name);
  fs::remove_all(dir);
  return dir;
}

} // namespace

TEST_CASE("validate accepts a good feeder") {
  const auto r = run({"validate", fixture("four_bus_3ph.feeder")});
  CHECK(r.code == 0);
  CHECK(r.out == "OK 4 3\n");
}

TEST_CASE("validate lists violations for a cyclic feeder") {
  const auto r = run({"validate", fixture("cyclic.feeder")});
  CHECK(r.code == 2);
  CHECK(r.out == "l3\tnot radial\n");
}

TEST_CASE("validate positions parse errors") {
  const auto path = fixture("malformed.feeder");
  const auto r = run({"validate", path});
  CHECK(r.code == 1);
  CHECK(r.err.rfind(path + ":3:33 ", 0) == 0);
}

TEST_CASE("solve on a no-load feeder gives unit voltages") {
  const auto dir = scratch("noload");
  const auto r = run({"solve", fixture("no_load.feeder"), "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto v = rows(slurp(dir / "voltages.csv"));
  CHECK(v.front() == std::vector<std::string>{"bus", "phase", "v_real", "v_imag", "v_pu", "dist_m"});
  CHECK(v.back() == std::vector<std::string>{"converged", "true"});
  CHECK(v.size() == 2 + 7);
  // Shortest round-trip output: rotated phases may print 0.9999999999999999.
  for (std::size_t i = 1; i + 1 < v.size(); ++i)
    CHECK(std::abs(std::stod(v[i][4]) - 1.0) <= 2e-16);
  CHECK(v[1][0] == "e");
  CHECK(v[1][1] == "b");
  CHECK(v[1][5] == "450");
  CHECK(v[7][5] == "0");
  for (const char* f : {"currents.csv", "losses.csv"})
    CHECK(slurp(dir / f).ends_with("converged,true\n"));
}

TEST_CASE("solve output equals the library solution to full precision") {
  const auto dir = scratch("fourbus");
  REQUIRE(run({"solve", fixture("four_bus_3ph.feeder"), "--out", dir.string()}).code == 0);
  const auto net = load_feeder(fixture("four_bus_3ph.feeder"));
  const auto sol = solve(net);
  const auto v = rows(slurp(dir / "voltages.csv"));
  std::size_t row = 1;
  for (std::size_t b = 0; b < net.buses().size(); ++b)
    for (Phase p : kAllPhases) {
      const Complex x = sol.bus_voltages[b][slot(p)];
      CHECK(std::stod(v[row][2]) == x.real());
      CHECK(std::stod(v[row][3]) == x.imag());
      ++row;
    }
  const auto loss = total_loss(net, sol);
  const auto l = rows(slurp(dir / "losses.csv"));
  CHECK(l[0] == std::vector<std::string>{"element", "kind", "kw"});
  bool found = false;
  for (const auto& cells : l)
    if (cells[0] == "total_loss_kw") {
      found = true;
      CHECK(std::stod(cells[2]) == loss.total_loss_kw);
    }
  CHECK(found);
  const auto c = rows(slurp(dir / "currents.csv"));
  CHECK(c[1][0] == "l12");
  CHECK(std::stod(c[1][5]) == std::abs(sol.branch_currents[0][0]));
  CHECK(c[1][6] == "530");
}

TEST_CASE("distance column sums segment lengths") {
  const auto dir = scratch("dist");
  REQUIRE(run({"solve", fixture("two_dg.feeder"), "--out", dir.string()}).code == 0);
  for (const auto& cells : rows(slurp(dir / "voltages.csv"))) {
    if (cells[0] == "m4")
      CHECK(cells[5] == "6400");
    if (cells[0] == "lv2")
      CHECK(cells[5] == "4050");
  }
  const auto dir2 = scratch("nodist");
  REQUIRE(run({"solve", fixture("capacitor.feeder"), "--out", dir2.string()}).code == 0);
  CHECK(rows(slurp(dir2 / "voltages.csv"))[2][5].empty());
}

TEST_CASE("solve reports non-convergence with exit 3 and a footer") {
  const auto dir = scratch("diverge");
  const auto r = run({"solve", fixture("nonconvergent.feeder"), "--out", dir.string()});
  CHECK(r.code == 3);
  for (const char* f : {"voltages.csv", "currents.csv", "losses.csv"})
    CHECK(slurp(dir / f).ends_with("converged,false\n"));
}

TEST_CASE("plan writes every artifact") {
  const auto dir = scratch("plan");
  const auto r = run({"plan", fixture("degenerate_dg.feeder"), "--seed", "3", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto plan = rows(slurp(dir / "plan.csv"));
  CHECK(plan[0] == std::vector<std::string>{"dg", "bus", "phases", "p_min_kw", "p_max_kw", "capacity_kw"});
  CHECK(plan[1] == std::vector<std::string>{"g1", "e", "abc", "75", "75", "75"});
  CHECK(rows(slurp(dir / "convergence.csv"))[0] == std::vector<std::string>{"iteration", "engine", "best_fitness"});
  CHECK(slurp(dir / "report.csv").rfind("metric,base,optimized\n", 0) == 0);
  const std::string summary = slurp(dir / "summary.txt");
  for (const char* key : {"engine=cfpso\n", "seed=3\n", "evaluations=1\n", "wall_time_s="})
    CHECK(summary.find(key) != std::string::npos);
  CHECK(fs::exists(dir / "voltages_base.csv"));
  CHECK(fs::exists(dir / "voltages_optimized.csv"));
}

TEST_CASE("plan configuration errors exit 4") {
  const auto dir = scratch("misconf").string();
  const auto six = fixture("six_bus_dg.feeder");
  CHECK(run({"plan", six, "--out", dir}).code == 4);
  CHECK(run({"plan", six, "--seed", "x", "--out", dir}).code == 4);
  CHECK(run({"plan", six, "--seed", "1", "--set", "bogus=1", "--out", dir}).code == 4);
  CHECK(run({"plan", six, "--seed", "1", "--set", "w=0.5", "--out", dir}).code == 4);
  CHECK(run({"plan", six, "--seed", "1", "--set", "c1=1", "--set", "c2=1", "--out", dir}).code == 4);
  CHECK(run({"plan", six, "--seed", "1", "--set", "penalty.voltage=0", "--out", dir}).code == 4);
  CHECK(run({"plan", six, "--seed", "1", "--engine", "sa", "--out", dir}).code == 4);
  CHECK(run({"plan", fixture("four_bus_3ph.feeder"), "--seed", "1", "--out", dir}).code == 4);
  CHECK(run({"solve", six, "--set", "swarm_size=3", "--out", dir}).code == 4);
}

TEST_CASE("plan accepts engine overrides") {
  const auto dir = scratch("overrides");
  const auto r = run({"plan", fixture("six_bus_dg.feeder"), "--engine", "ga", "--seed", "5", "--set",
                      "population_size=8", "--set", "max_iterations=4", "--set", "stall_iterations=0",
                      "--out", dir.string()});
  REQUIRE(r.code == 0);
  CHECK(slurp(dir / "summary.txt").find("evaluations=36\n") != std::string::npos);
}

TEST_CASE("seed auto prints the chosen seed") {
  const auto dir = scratch("auto");
  const auto r = run({"plan", fixture("degenerate_dg.feeder"), "--seed", "auto", "--out", dir.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("seed=", 0) == 0);
}

TEST_CASE("help prints defaults") {
  const auto r = run({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("swarm_size (30)") != std::string::npos);
  CHECK(r.out.find("cfpso") != std::string::npos);
}

TEST_CASE("commands never touch the feeder file") {
  const auto path = fixture("six_bus_dg.feeder");
  const std::string before = slurp(path);
  const auto dir = scratch("idem").string();
  run({"validate", path});
  run({"solve", path, "--out", dir});
  run({"plan", path, "--seed", "1", "--set", "max_iterations=2", "--out", dir});
  CHECK(slurp(path) == before);
}
