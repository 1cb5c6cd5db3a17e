#include <doctest.h>

#include <cmath>

#include "mphase/feeder/parser.hpp"
#include "mphase/planner/report.hpp"
#include "oracle.hpp"

using namespace mphase;
using testing::fixture;

namespace {

PlannerConfig quick(optim::EngineParams engine) {
  PlannerConfig c;
  c.engine = std::move(engine);
  return c;
}

optim::CfPsoParams cfpso(std::uint64_t seed) {
  optim::CfPsoParams p;
  p.seed = seed;
  p.swarm_size = 12;
  p.max_iterations = 30;
  return p;
}

} // namespace

TEST_CASE("zero DG on a feasible feeder costs exactly the squared base loss") {
  const auto net = load_feeder(fixture("degenerate_dg.feeder"));
  const PlannerConfig config;
  const double zero[] = {0.0};
  const auto sol = SweepSolver(net).solve(config.solver, zero);
  REQUIRE(check_limits(net, sol).clean());
  CHECK(fitness(net, zero, config) == loss_squared(total_loss(net, sol)));
}

TEST_CASE("reverse-flow overvoltage is penalised on top of the loss") {
  const auto net = build(parse("bus s phases=a kv_ln=7.2 source=true\n"
                               "bus e phases=a kv_ln=7.2\n"
                               "line l from=s to=e phases=a z=[2+4j]\n"
                               "load ld bus=e phases=a kw=10\n"
                               "dg g bus=e phases=a pmax_kw=100\n"));
  const PlannerConfig config;
  const double absurd[] = {4000.0};
  const FitnessFunction fit(net, config.penalties, config.solver);
  const FitnessTerms t = fit.terms(absurd);
  REQUIRE(t.converged);
  // Oracle: both terms evaluated separately from the solved state.
  const auto sol = SweepSolver(net).solve(config.solver, absurd);
  const double loss = loss_squared(total_loss(net, sol));
  const double v = voltage_pu(net, sol, *net.find_bus("e"), Phase::A);
  REQUIRE(v > 1.06);
  CHECK(t.loss_objective == loss);
  CHECK(t.voltage_penalty == doctest::Approx(1e3 * (v - 1.06) * (v - 1.06)));
  CHECK(t.total > loss);
  CHECK(fitness(net, absurd, config) == t.total);
}

TEST_CASE("non-convergence costs exactly the configured penalty") {
  const auto net = load_feeder(fixture("nonconvergent.feeder"));
  PlannerConfig config;
  const double zero[] = {0.0};
  CHECK(fitness(net, zero, config) == 1e6);
  config.penalties.nonconvergence = 123.0;
  CHECK(fitness(net, zero, config) == 123.0);
}

TEST_CASE("degenerate bounds fix the capacity") {
  const auto net = load_feeder(fixture("degenerate_dg.feeder"));
  const auto r = plan(net, quick(cfpso(1)));
  REQUIRE(r.capacities_kw.size() == 1);
  CHECK(r.capacities_kw[0] == 75.0);
  CHECK(r.optimization.evaluations == 1);
  CHECK(r.optimization.history.empty());
  CHECK(r.optimized_loss.total_loss_kw < r.base_loss.total_loss_kw);
}

TEST_CASE("plan requires DG units") {
  const auto net = load_feeder(fixture("four_bus_3ph.feeder"));
  CHECK_THROWS_AS(plan(net, PlannerConfig{}), NoDGUnits);
}

TEST_CASE("plan surfaces a divergent base case") {
  const auto net = load_feeder(fixture("nonconvergent.feeder"));
  CHECK_THROWS_AS(plan(net, quick(cfpso(1))), NotConverged);
}

TEST_CASE("plans respect bounds, beat the base case and reproduce") {
  const auto net = load_feeder(fixture("two_dg.feeder"));
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    CAPTURE(seed);
    optim::GaParams ga;
    ga.seed = seed;
    ga.population_size = 12;
    ga.max_generations = 20;
    for (const optim::EngineParams& engine : {optim::EngineParams{cfpso(seed)}, optim::EngineParams{ga}}) {
      const auto r = plan(net, quick(engine));
      for (std::size_t i = 0; i < r.capacities_kw.size(); ++i) {
        CHECK(r.capacities_kw[i] >= net.dg_units()[i].p_min_kw);
        CHECK(r.capacities_kw[i] <= net.dg_units()[i].p_max_kw);
      }
      CHECK(r.best_fitness <= r.base_fitness);
      CHECK(r.seed == seed);
      const auto again = plan(net, quick(engine));
      CHECK(again.capacities_kw == r.capacities_kw);
      CHECK(again.optimization.history == r.optimization.history);
    }
  }
}

TEST_CASE("penalty weights must be positive") {
  CHECK_THROWS(PenaltyWeights{0.0, 1.0, 1.0}.validate());
  CHECK_THROWS(PenaltyWeights{1.0, -1.0, 1.0}.validate());
  CHECK_NOTHROW(PenaltyWeights{}.validate());
}

TEST_CASE("report arithmetic on the published totals") {
  LossBreakdown base;
  base.total_loss_kw = 1272.0;
  base.load_power_kw = 10773.0;
  LossBreakdown best;
  best.total_loss_kw = 814.0;
  best.load_power_kw = 10773.0;
  const auto r = compare_report(base, best);
  CHECK(r.find("total_loss_mw")->base == doctest::Approx(1.272));
  CHECK(std::round(r.find("loss_percent")->base * 100.0) / 100.0 == 11.81);
  CHECK(std::round(r.find("loss_percent")->optimized * 100.0) / 100.0 == 7.56);
  CHECK(r.loss_reduction_kw == doctest::Approx(458.0).epsilon(1e-12));
  CHECK(r.loss_reduction_points == doctest::Approx(100.0 * 458.0 / 10773.0));
  CHECK(r.loss_reduction_percent == doctest::Approx(100.0 * 458.0 / 1272.0));
}

TEST_CASE("equal losses give zero reduction") {
  LossBreakdown same;
  same.total_loss_kw = 5.0;
  same.load_power_kw = 100.0;
  const auto r = compare_report(same, same);
  CHECK(r.loss_reduction_kw == 0.0);
  CHECK(r.loss_reduction_points == 0.0);
  CHECK(r.loss_reduction_percent == 0.0);
}

TEST_CASE("report CSV round-trips") {
  const auto net = load_feeder(fixture("six_bus_dg.feeder"));
  const auto r = compare_report(plan(net, quick(cfpso(4))));
  const auto back = parse_report_csv(report_csv(r));
  REQUIRE(back.rows.size() == r.rows.size());
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    CHECK(back.rows[i].metric == r.rows[i].metric);
    CHECK(back.rows[i].base == r.rows[i].base);
    CHECK(back.rows[i].optimized == r.rows[i].optimized);
  }
  CHECK(back.loss_reduction_kw == r.loss_reduction_kw);
  CHECK(back.loss_reduction_percent == r.loss_reduction_percent);
  CHECK_THROWS(parse_report_csv("metric,base\n"));
  CHECK_THROWS(parse_report_csv("metric,base,optimized\nx,1,zz\n"));
}
