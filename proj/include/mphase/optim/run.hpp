#pragma once

#include <string>
#include <variant>
#include <vector>

#include "mphase/optim/ga.hpp"
#include "mphase/optim/pso.hpp"

namespace mphase::optim {

using EngineParams = std::variant<CfPsoParams, IwPsoParams, GaParams>;

struct OptimizationResult {
  std::string engine;
  std::vector<double> best_x;
  double best_value = 0.0;
  double initial_value = 0.0;  // global best after initialization
  std::vector<double> history; // one entry per executed iteration
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
};

/// "cfpso", "iwpso" or "ga".
std::string engine_name(const EngineParams& params);
std::uint64_t engine_seed(const EngineParams& params);

/// Initializes from the params' seed and iterates until max iterations or
/// until the global best has not improved by more than 1e-9 for
/// stall_iterations consecutive iterations.
OptimizationResult run(const SearchSpace& space, const EngineParams& params,
                       const Objective& objective);

} // namespace mphase::optim
