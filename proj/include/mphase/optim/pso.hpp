#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mphase/optim/evaluate.hpp"
#include "mphase/optim/search_space.hpp"

namespace mphase::optim {

/// How r1, r2 are drawn in the velocity update.
enum class RandomCoefficients { per_dimension, per_particle };

/// What happens when a particle leaves the box.
///  absorbing:  clamp to the bound and zero that velocity component.
///  reflecting: mirror the position about the bound and negate the component.
enum class BoundaryMode { absorbing, reflecting };

struct Particle {
  std::vector<double> position;
  std::vector<double> velocity;
  std::vector<double> best_position;
  double value = 0.0;
  double best_value = 0.0;
};

struct SwarmState {
  std::vector<Particle> particles;
  std::vector<double> global_best;
  double global_best_value = 0.0;
  std::size_t iteration = 0;
  std::vector<double> history; // global best after each iteration
  std::size_t evaluations = 0;
  std::size_t stall = 0;       // iterations since the last improvement
};

/// Clerc-Kennedy constriction factor 2 / |2 - phi - sqrt(phi^2 - 4 phi)|.
/// Throws std::invalid_argument unless phi > 4.
double constriction_factor(double phi);

struct CfPsoParams {
  double c1 = 2.05;
  double c2 = 2.05;
  std::size_t swarm_size = 30;
  std::size_t max_iterations = 100;
  std::size_t stall_iterations = 20; // 0 disables early stopping
  std::uint64_t seed = 0;
  RandomCoefficients coefficients = RandomCoefficients::per_dimension;
  BoundaryMode boundary = BoundaryMode::absorbing;
  Execution execution = Execution::parallel;

  double phi() const { return c1 + c2; }
  double k() const { return constriction_factor(phi()); }
  void validate() const;
};

struct IwPsoParams {
  double w = 0.7;
  double c1 = 2.0;
  double c2 = 2.0;
  std::size_t swarm_size = 30;
  std::size_t max_iterations = 100;
  std::size_t stall_iterations = 20;
  std::uint64_t seed = 0;
  RandomCoefficients coefficients = RandomCoefficients::per_dimension;
  BoundaryMode boundary = BoundaryMode::absorbing;
  Execution execution = Execution::parallel;

  void validate() const;
};

/// Positions uniform in the box, velocities uniform in +-10% of each width,
/// one evaluation per particle to seed the personal and global bests.
SwarmState initialize_swarm(const SearchSpace& space, std::size_t swarm_size,
                            const Objective& objective, Rng& rng,
                            Execution execution = Execution::serial);

/// One synchronous iteration: all velocities and positions are updated from
/// the bests known at the start of the step (random draws in particle order),
/// the batch is evaluated, then bests are updated in particle order.
void cfpso_step(SwarmState& state, const SearchSpace& space, const CfPsoParams& params,
                const Objective& objective, Rng& rng);

void iwpso_step(SwarmState& state, const SearchSpace& space, const IwPsoParams& params,
                const Objective& objective, Rng& rng);

} // namespace mphase::optim
