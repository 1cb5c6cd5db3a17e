#include <algorithm>

#include "mphase/planner/planner.hpp"

namespace mphase {

namespace {

struct SolvedCase {
  PowerFlowSolution solution;
  LossBreakdown loss;
  LimitReport limits;
};

SolvedCase solve_case(const FitnessFunction& fit, std::span<const double> capacity_kw,
                      const char* label) {
  SolvedCase c;
  c.solution = fit.solver().solve(fit.settings(), capacity_kw);
  if (!c.solution.converged)
    throw NotConverged(std::string(label) + " load flow did not converge");
  c.loss = total_loss(fit.solver().network(), c.solution);
  c.limits = check_limits(fit.solver().network(), c.solution);
  return c;
}

} // namespace

DGPlanResult plan(const PhasedNetwork& network, const PlannerConfig& config) {
  const auto& units = network.dg_units();
  if (units.empty())
    throw NoDGUnits("the feeder has no DG units to size");

  const FitnessFunction fit(network, config.penalties, config.solver);

  // Units with coincident bounds are fixed; the rest form the search space.
  std::vector<double> template_kw;
  std::vector<std::size_t> free_units;
  std::vector<double> lower;
  std::vector<double> upper;
  for (std::size_t i = 0; i < units.size(); ++i) {
    const DGUnit& u = units[i];
    template_kw.push_back(u.p_min_kw);
    if (u.p_max_kw - u.p_min_kw > optim::SearchSpace::min_width(u.p_min_kw, u.p_max_kw)) {
      free_units.push_back(i);
      lower.push_back(u.p_min_kw);
      upper.push_back(u.p_max_kw);
    }
  }

  auto expand = [&](std::span<const double> x) {
    std::vector<double> kw = template_kw;
    for (std::size_t d = 0; d < free_units.size(); ++d)
      kw[free_units[d]] = x[d];
    return kw;
  };

  DGPlanResult result;
  result.seed = optim::engine_seed(config.engine);
  for (const DGUnit& u : units)
    result.dg_ids.push_back(u.id);

  if (free_units.empty()) {
    result.capacities_kw = template_kw;
    result.best_fitness = fit(template_kw);
    result.optimization.engine = optim::engine_name(config.engine);
    result.optimization.best_value = result.optimization.initial_value = result.best_fitness;
    result.optimization.evaluations = 1;
  } else {
    const optim::SearchSpace space(lower, upper);
    const optim::Objective objective = [&](std::span<const double> x) { return fit(expand(x)); };
    result.optimization = optim::run(space, config.engine, objective);
    result.capacities_kw = expand(result.optimization.best_x);
    for (std::size_t d = 0; d < free_units.size(); ++d) {
      const DGUnit& u = units[free_units[d]];
      double& kw = result.capacities_kw[free_units[d]];
      kw = std::clamp(kw, u.p_min_kw, u.p_max_kw);
    }
    result.best_fitness = result.optimization.best_value;
  }

  const std::vector<double> zeros(units.size(), 0.0);
  result.base_fitness = fit(zeros);
  SolvedCase base = solve_case(fit, zeros, "base case");
  SolvedCase best = solve_case(fit, result.capacities_kw, "optimized case");
  result.base_solution = std::move(base.solution);
  result.base_loss = std::move(base.loss);
  result.base_limits = std::move(base.limits);
  result.optimized_solution = std::move(best.solution);
  result.optimized_loss = std::move(best.loss);
  result.optimized_limits = std::move(best.limits);
  return result;
}

} // namespace mphase
