#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mphase/losses/losses.hpp"
#include "mphase/optim/run.hpp"

namespace mphase {

class NoDGUnits : public Error {
public:
  using Error::Error;
};

/// Quadratic exterior penalties for the voltage and ampacity constraints,
/// plus a flat price for load flows that fail to converge.
struct PenaltyWeights {
  double voltage = 1e3;         // per (pu violation)^2
  double ampacity = 1e3;        // per (relative overload)^2
  double nonconvergence = 1e6;  // returned as the whole fitness

  void validate() const;
};

struct PlannerConfig {
  optim::EngineParams engine = optim::CfPsoParams{};
  PenaltyWeights penalties;
  SolverSettings solver{1e-6, 100, true};
};

struct FitnessTerms {
  bool converged = false;
  double loss_objective = 0.0; // loss_squared, MW^2
  double voltage_penalty = 0.0;
  double ampacity_penalty = 0.0;
  double total = 0.0;
};

/// Fitness of DG capacity vectors on one feeder. Holds a compiled solver, so
/// repeated evaluations only copy the capacity vector. Thread-safe.
class FitnessFunction {
public:
  /// Throws NotRadial or SingularElement for unusable networks.
  FitnessFunction(const PhasedNetwork& network, PenaltyWeights penalties, SolverSettings solver);

  FitnessTerms terms(std::span<const double> capacity_kw) const;
  double operator()(std::span<const double> capacity_kw) const { return terms(capacity_kw).total; }

  const SweepSolver& solver() const { return solver_; }
  const SolverSettings& settings() const { return settings_; }

private:
  SweepSolver solver_;
  PenaltyWeights penalties_;
  SolverSettings settings_;
};

/// Loss objective plus penalties for one capacity vector (one entry per DG
/// unit, network order). Never throws for numerical failures: a load flow
/// that does not converge costs exactly config.penalties.nonconvergence.
double fitness(const PhasedNetwork& network, std::span<const double> capacity_kw,
               const PlannerConfig& config);

struct DGPlanResult {
  std::vector<std::string> dg_ids;
  std::vector<double> capacities_kw;
  double best_fitness = 0.0;
  double base_fitness = 0.0; // every DG at 0 kW
  LossBreakdown base_loss;
  LossBreakdown optimized_loss;
  LimitReport base_limits;
  LimitReport optimized_limits;
  PowerFlowSolution base_solution;
  PowerFlowSolution optimized_solution;
  optim::OptimizationResult optimization;
  std::uint64_t seed = 0;
};

/// Runs the configured engine over the box [p_min_kw, p_max_kw] of every DG
/// unit. Units whose bounds coincide are held fixed and not searched.
/// Throws NoDGUnits, BuildError-style validation failures as NotRadial /
/// SingularElement, or NotConverged if the base or optimized case diverges.
DGPlanResult plan(const PhasedNetwork& network, const PlannerConfig& config);

} // namespace mphase
