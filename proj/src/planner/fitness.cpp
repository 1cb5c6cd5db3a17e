#include <cmath>

#include "mphase/planner/planner.hpp"

namespace mphase {

void PenaltyWeights::validate() const {
  if (!(voltage > 0.0) || !(ampacity > 0.0) || !(nonconvergence > 0.0))
    throw std::invalid_argument("penalty weights must be positive");
}

FitnessFunction::FitnessFunction(const PhasedNetwork& network, PenaltyWeights penalties,
                                 SolverSettings solver)
    : solver_(network), penalties_(penalties), settings_(solver) {
  penalties_.validate();
  settings_.validate();
}

FitnessTerms FitnessFunction::terms(std::span<const double> capacity_kw) const {
  FitnessTerms t;
  const PowerFlowSolution sol = solver_.solve(settings_, capacity_kw);
  if (!sol.converged) {
    t.total = penalties_.nonconvergence;
    return t;
  }
  const PhasedNetwork& net = solver_.network();
  t.converged = true;
  t.loss_objective = loss_squared(total_loss(net, sol));
  const LimitReport limits = check_limits(net, sol);
  for (const auto& v : limits.voltage_violations) {
    const double excess = v.v_pu < net.limits().min_pu ? net.limits().min_pu - v.v_pu
                                                       : v.v_pu - net.limits().max_pu;
    t.voltage_penalty += penalties_.voltage * excess * excess;
  }
  for (const auto& a : limits.ampacity_violations) {
    const double overload = (a.amps - a.limit) / a.limit;
    t.ampacity_penalty += penalties_.ampacity * overload * overload;
  }
  t.total = t.loss_objective + t.voltage_penalty + t.ampacity_penalty;
  if (!std::isfinite(t.total))
    t.total = penalties_.nonconvergence;
  return t;
}

double fitness(const PhasedNetwork& network, std::span<const double> capacity_kw,
               const PlannerConfig& config) {
  try {
    return FitnessFunction(network, config.penalties, config.solver)(capacity_kw);
  } catch (const SingularElement&) {
    return config.penalties.nonconvergence;
  }
}

} // namespace mphase
