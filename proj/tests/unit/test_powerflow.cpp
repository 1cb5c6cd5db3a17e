#include <doctest.h>

#include <numbers>

#include "mphase/feeder/parser.hpp"
#include "mphase/powerflow/solver.hpp"
#include "oracle.hpp"

using namespace mphase;
using testing::fixture;

namespace {

SolverSettings tight() { return SolverSettings{1e-11, 1000, true}; }

PhasedNetwork two_bus(double kw, double kvar, double amps = 1e9) {
  return build(parse("bus s phases=a kv_ln=7.2 source=true\n"
                     "bus e phases=a kv_ln=7.2\n"
                     "line l from=s to=e phases=a z=[0.3+0.6j] amps=" +
                     format_number(amps) + "\nload ld bus=e kw=" + format_number(kw) + " kvar=" + format_number(kvar) +
                     "\n"));
}

double max_pu_difference(const PhasedNetwork& net, const std::vector<PhaseVector>& a,
                         const std::vector<PhaseVector>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < net.buses().size(); ++i)
    for (Phase p : kAllPhases)
      if (net.buses()[i].phases.contains(p))
        worst = std::max(worst, std::abs(a[i][slot(p)] - b[i][slot(p)]) / net.buses()[i].nominal_voltage);
  return worst;
}

} // namespace

TEST_CASE("no load gives a flat profile") {
  const auto net = load_feeder(fixture("no_load.feeder"));
  const auto sol = solve(net);
  REQUIRE(sol.converged);
  CHECK(sol.iterations <= 2);
  const double deg = std::numbers::pi / 180.0;
  for (std::size_t b = 0; b < net.buses().size(); ++b) {
    CHECK(sol.bus_voltages[b][0] == Complex(7200.0, 0.0) * double(net.buses()[b].phases.contains(Phase::A)));
    if (net.buses()[b].phases.contains(Phase::B))
      CHECK(std::abs(sol.bus_voltages[b][1] - std::polar(7200.0, -120.0 * deg)) < 1e-9);
  }
  const auto limits = check_limits(net, sol);
  CHECK(limits.clean());
  CHECK(limits.min_v_pu == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(limits.max_v_pu == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("two-bus solve matches the scalar fixed point") {
  const auto net = two_bus(100.0, 0.0);
  const auto sol = solve(net, tight());
  REQUIRE(sol.converged);
  const Complex v = testing::scalar_fixed_point(7200.0, {0.3, 0.6}, {100e3, 0.0});
  const std::size_t e = *net.find_bus("e");
  CHECK(std::abs(sol.bus_voltages[e][0] - v) <= 1e-6);
  CHECK(std::abs(sol.branch_currents[0][0] - std::conj(Complex(100e3, 0) / v)) <= 1e-6);
}

TEST_CASE("three-phase fixtures match the nodal oracle") {
  for (const char* name : {"four_bus_3ph.feeder", "transformer.feeder", "capacitor.feeder", "regulator.feeder",
                           "mixed_loads.feeder", "two_dg.feeder"}) {
    CAPTURE(name);
    const auto net = load_feeder(fixture(name));
    const auto sol = solve(net, tight());
    REQUIRE(sol.converged);
    const auto oracle = testing::nodal_solve(net);
    REQUIRE(oracle.converged);
    CHECK(max_pu_difference(net, sol.bus_voltages, oracle.voltages) <= 1e-6);
  }
}

TEST_CASE("undervoltage at 0.93 pu is one violation") {
  // Bisect the load that puts the receiving end at 0.93 pu using the scalar oracle.
  double lo = 0.0;
  double hi = 20000.0;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double v = std::abs(testing::scalar_fixed_point(7200.0, {0.3, 0.6}, {mid * 1e3, 0.0})) / 7200.0;
    (v > 0.93 ? lo : hi) = mid;
  }
  const auto net = two_bus(lo, 0.0);
  const auto sol = solve(net, tight());
  REQUIRE(sol.converged);
  const auto report = check_limits(net, sol);
  REQUIRE(report.voltage_violations.size() == 1);
  CHECK(report.voltage_violations[0].bus == "e");
  CHECK(report.voltage_violations[0].v_pu == doctest::Approx(0.93).epsilon(1e-9));
}

TEST_CASE("current equal to ampacity is a violation") {
  const auto probe = solve(two_bus(100.0, 20.0), tight());
  const double amps = std::abs(probe.branch_currents[0][0]);
  const auto net = two_bus(100.0, 20.0, amps);
  const auto report = check_limits(net, solve(net, tight()));
  REQUIRE(report.ampacity_violations.size() == 1);
  CHECK(report.ampacity_violations[0].branch == "l");
  CHECK(report.ampacity_violations[0].amps == amps);
  const auto loose = two_bus(100.0, 20.0, std::nextafter(amps, 1e9));
  CHECK(check_limits(loose, solve(loose, tight())).ampacity_violations.empty());
}

TEST_CASE("tighter tolerance never increases the mismatch") {
  const auto net = load_feeder(fixture("two_dg.feeder"));
  const auto coarse = solve(net, {1e-3, 100, true});
  const auto fine = solve(net, {1e-8, 100, true});
  REQUIRE(coarse.converged);
  REQUIRE(fine.converged);
  CHECK(fine.max_mismatch_pu <= coarse.max_mismatch_pu);
  CHECK(fine.max_mismatch_pu <= 1e-8);
  CHECK(fine.iterations >= coarse.iterations);
}

TEST_CASE("warm start converges to the same answer") {
  const auto net = load_feeder(fixture("four_bus_3ph.feeder"));
  const SweepSolver solver(net);
  const auto cold = solver.solve({1e-9, 100, true});
  const auto warm = solver.solve({1e-9, 100, false}, {}, cold.bus_voltages);
  REQUIRE(warm.converged);
  CHECK(warm.iterations <= 2);
  CHECK(max_pu_difference(net, cold.bus_voltages, warm.bus_voltages) <= 1e-9);
}

TEST_CASE("solutions are bit-identical across runs") {
  const auto net = load_feeder(fixture("mixed_loads.feeder"));
  const auto a = solve(net);
  const auto b = solve(net);
  CHECK(a.bus_voltages == b.bus_voltages);
  CHECK(a.branch_currents == b.branch_currents);
}

TEST_CASE("divergence is reported, not thrown") {
  const auto net = load_feeder(fixture("nonconvergent.feeder"));
  const auto sol = solve(net);
  CHECK_FALSE(sol.converged);
  CHECK(sol.iterations == 100);
  CHECK_THROWS_AS(check_limits(net, sol), NotConverged);
}

TEST_CASE("singular impedance is rejected") {
  const auto net = build(parse("bus s kv_ln=1 phases=ab source=true\nbus e kv_ln=1 phases=ab\n"
                               "line l from=s to=e phases=ab z=[1+1j 1+1j | 1+1j 1+1j]\n"));
  CHECK_THROWS_AS(SweepSolver{net}, SingularElement);
}

TEST_CASE("DG output offsets source power") {
  const auto net = load_feeder(fixture("six_bus_dg.feeder"));
  const SweepSolver solver(net);
  const double none[] = {0.0};
  const double some[] = {200.0};
  const auto a = solver.solve(tight(), none);
  const auto b = solver.solve(tight(), some);
  CHECK(a.source_power.real() - b.source_power.real() > 190e3);
  const std::size_t b5 = *net.find_bus("b5");
  CHECK(b.bus_dg_power[b5] == 200e3);
}

TEST_CASE("settings are validated") {
  CHECK_THROWS(SolverSettings{0.0, 10, true}.validate());
  CHECK_THROWS(SolverSettings{1e-4, 0, true}.validate());
  CHECK_NOTHROW(SolverSettings{}.validate());
}
