#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mphase/optim/evaluate.hpp"
#include "mphase/optim/search_space.hpp"

namespace mphase::optim {

/// Real-coded GA baseline: tournament selection, BLX-alpha crossover,
/// Gaussian mutation scaled to the box width, elitism of one.
struct GaParams {
  std::size_t population_size = 30;
  double crossover_rate = 0.9;
  double mutation_rate = 0.1;
  std::size_t tournament_size = 3;
  std::size_t max_generations = 100;
  std::size_t stall_generations = 20; // 0 disables early stopping
  std::uint64_t seed = 0;
  double blend_alpha = 0.5;
  double mutation_scale = 0.1; // sigma as a fraction of the box width
  Execution execution = Execution::parallel;

  void validate() const;
};

struct Individual {
  std::vector<double> genes;
  double value = 0.0;
};

struct Population {
  std::vector<Individual> individuals;
  std::vector<double> best;
  double best_value = 0.0;
  std::size_t generation = 0;
  std::vector<double> history;
  std::size_t evaluations = 0;
  std::size_t stall = 0;
};

Population initialize_population(const SearchSpace& space, const GaParams& params,
                                 const Objective& objective, Rng& rng);

/// Replaces the population with the elite plus population_size - 1 offspring.
/// Only offspring are evaluated.
void ga_step(Population& population, const SearchSpace& space, const GaParams& params,
             const Objective& objective, Rng& rng);

} // namespace mphase::optim
