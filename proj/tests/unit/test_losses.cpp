#include <doctest.h>

#include "mphase/feeder/parser.hpp"
#include "mphase/losses/losses.hpp"
#include "oracle.hpp"

using namespace mphase;
using testing::fixture;

namespace {

const SolverSettings kTight{1e-11, 1000, true};

} // namespace

TEST_CASE("single-phase loss equals I^2 R") {
  const auto net = load_feeder(fixture("two_bus_1ph.feeder"));
  const auto sol = solve(net, kTight);
  const double two_ended = segment_loss(net, sol, "l1");
  const double naive = testing::naive_i2r_w(net.segments()[0].z, sol.branch_currents[0], net.segments()[0].phases) / 1e3;
  CHECK(std::abs(two_ended - naive) <= 1e-9);
}

TEST_CASE("coupled segment loss includes mutual resistance terms") {
  const auto net = load_feeder(fixture("four_bus_3ph.feeder"));
  const auto sol = solve(net, kTight);
  const auto oracle = testing::nodal_solve(net);
  REQUIRE(oracle.converged);
  for (std::size_t s = 0; s < net.segments().size(); ++s) {
    const LineSegment& seg = net.segments()[s];
    CAPTURE(seg.id);
    const double two_ended = segment_loss(net, sol, seg.id);
    const double oracle_kw = testing::branch_loss_va(net, s, oracle.voltages).real() / 1e3;
    const PhaseVector i = testing::branch_current(net, s, oracle.voltages);
    const double naive = testing::naive_i2r_w(seg.z, i, seg.phases) / 1e3;
    // I^H R I minus the diagonal part: 2 sum_{p<q} R_pq Re(conj(I_p) I_q).
    double mutual = 0.0;
    for (std::size_t p = 0; p < 3; ++p)
      for (std::size_t q = p + 1; q < 3; ++q)
        mutual += 2.0 * seg.z(p, q).real() * (std::conj(i[p]) * i[q]).real();
    CHECK(two_ended == doctest::Approx(oracle_kw).epsilon(1e-7));
    CHECK(std::abs(two_ended - naive) > 1e-3);
    CHECK((two_ended - naive) == doctest::Approx(mutual / 1e3).epsilon(1e-6));
  }
}

TEST_CASE("breakdown separates lines and transformers") {
  const auto net = load_feeder(fixture("transformer.feeder"));
  const auto sol = solve(net, kTight);
  const auto loss = total_loss(net, sol);
  CHECK(loss.per_branch_kw.size() == 3);
  CHECK(loss.transformer_loss_kw == loss.per_branch_kw.at("t1"));
  CHECK(loss.line_loss_kw == loss.per_branch_kw.at("l1") + loss.per_branch_kw.at("l2"));
  CHECK(loss.total_loss_kw == loss.line_loss_kw + loss.transformer_loss_kw);
  CHECK(loss.transformer_loss_kw > 0.0);
  CHECK(loss.loss_percent == doctest::Approx(100.0 * loss.total_loss_kw / loss.load_power_kw));
}

TEST_CASE("source power balances load, DG and losses") {
  for (const char* name : {"four_bus_3ph.feeder", "transformer.feeder", "capacitor.feeder", "mixed_loads.feeder",
                           "regulator.feeder", "six_bus_dg.feeder"}) {
    CAPTURE(name);
    const auto net = load_feeder(fixture(name));
    std::vector<double> dg(net.dg_units().size(), 150.0);
    const auto sol = SweepSolver(net).solve({1e-6, 100, true}, dg);
    REQUIRE(sol.converged);
    Complex load{0.0, 0.0};
    for (const Complex& s : sol.bus_load_power)
      load += s;
    double gen = 0.0;
    for (double w : sol.bus_dg_power)
      gen += w;
    const auto loss = total_loss(net, sol);
    CHECK(std::abs(sol.source_power.real() - (load.real() - gen + loss.total_loss_kw * 1e3)) / 1e6 <= 1e-6);
  }
}

TEST_CASE("loss_squared is MW squared") {
  LossBreakdown loss;
  loss.total_loss_kw = 1272.0;
  CHECK(loss_squared(loss) == doctest::Approx(1.617984).epsilon(1e-12));
  loss.total_loss_kw = 814.0;
  CHECK(loss_squared(loss) == doctest::Approx(0.662596).epsilon(1e-12));
}

TEST_CASE("loss accounting rejects unknown branches and unconverged states") {
  const auto net = load_feeder(fixture("two_bus_1ph.feeder"));
  const auto sol = solve(net);
  CHECK_THROWS_AS(segment_loss(net, sol, "nope"), UnknownBranch);
  auto bad = sol;
  bad.converged = false;
  CHECK_THROWS_AS(segment_loss(net, bad, "l1"), NotConverged);
  CHECK_THROWS_AS(total_loss(net, bad), NotConverged);
}
