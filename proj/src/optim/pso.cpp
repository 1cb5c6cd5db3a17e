#include "mphase/optim/pso.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mphase::optim {

double constriction_factor(double phi) {
  if (!(phi > 4.0) || !std::isfinite(phi))
    throw std::invalid_argument("constriction factor needs phi = c1 + c2 > 4");
  return 2.0 / std::abs(2.0 - phi - std::sqrt(phi * phi - 4.0 * phi));
}

namespace {

void validate_common(double c1, double c2, std::size_t swarm_size) {
  if (!(c1 >= 0.0) || !(c2 >= 0.0) || !std::isfinite(c1) || !std::isfinite(c2))
    throw std::invalid_argument("c1 and c2 must be finite and nonnegative");
  if (swarm_size < 1)
    throw std::invalid_argument("swarm size must be at least 1");
}

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

void apply_boundary(BoundaryMode mode, double lower, double upper, double& x, double& v) {
  if (x >= lower && x <= upper)
    return;
  if (mode == BoundaryMode::reflecting) {
    x = x < lower ? 2.0 * lower - x : 2.0 * upper - x;
    v = -v;
    x = std::clamp(x, lower, upper); // a long jump may overshoot the opposite bound
    return;
  }
  x = std::clamp(x, lower, upper);
  v = 0.0;
}

void update_bests(SwarmState& state, std::span<const double> values) {
  const double previous = state.global_best_value;
  for (std::size_t i = 0; i < state.particles.size(); ++i) {
    Particle& p = state.particles[i];
    p.value = values[i];
    if (p.value < p.best_value) {
      p.best_value = p.value;
      p.best_position = p.position;
      if (p.best_value < state.global_best_value) {
        state.global_best_value = p.best_value;
        state.global_best = p.best_position;
      }
    }
  }
  state.evaluations += state.particles.size();
  ++state.iteration;
  state.history.push_back(state.global_best_value);
  if (previous - state.global_best_value > kImprovementThreshold)
    state.stall = 0;
  else
    ++state.stall;
}

// Velocity rule: (v, cognitive, social) -> new v.
template <typename Rule>
void swarm_step(SwarmState& state, const SearchSpace& space, double c1, double c2,
                RandomCoefficients coefficients, BoundaryMode boundary, Execution execution,
                Rule rule, const Objective& objective, Rng& rng) {
  const std::size_t n = space.dimension();
  std::vector<std::vector<double>> positions;
  positions.reserve(state.particles.size());
  for (Particle& p : state.particles) {
    double r1 = 0.0;
    double r2 = 0.0;
    if (coefficients == RandomCoefficients::per_particle) {
      r1 = uniform01(rng);
      r2 = uniform01(rng);
    }
    for (std::size_t d = 0; d < n; ++d) {
      if (coefficients == RandomCoefficients::per_dimension) {
        r1 = uniform01(rng);
        r2 = uniform01(rng);
      }
      const double cognitive = r1 * c1 * (p.best_position[d] - p.position[d]);
      const double social = r2 * c2 * (state.global_best[d] - p.position[d]);
      p.velocity[d] = rule(p.velocity[d], cognitive, social);
      p.position[d] += p.velocity[d];
      apply_boundary(boundary, space.lower()[d], space.upper()[d], p.position[d], p.velocity[d]);
    }
    positions.push_back(p.position);
  }
  std::vector<double> values(positions.size());
  evaluate_batch(execution, objective, positions, values);
  update_bests(state, values);
}

} // namespace

void CfPsoParams::validate() const {
  validate_common(c1, c2, swarm_size);
  (void)k();
}

void IwPsoParams::validate() const {
  validate_common(c1, c2, swarm_size);
  if (!(w > 0.0) || !std::isfinite(w))
    throw std::invalid_argument("inertia weight must be positive");
}

SwarmState initialize_swarm(const SearchSpace& space, std::size_t swarm_size,
                            const Objective& objective, Rng& rng, Execution execution) {
  if (swarm_size < 1)
    throw std::invalid_argument("swarm size must be at least 1");
  const std::size_t n = space.dimension();
  SwarmState state;
  state.particles.resize(swarm_size);
  std::vector<std::vector<double>> positions;
  for (Particle& p : state.particles) {
    p.position.resize(n);
    p.velocity.resize(n);
    for (std::size_t d = 0; d < n; ++d) {
      p.position[d] = space.lower()[d] + uniform01(rng) * space.width(d);
      p.velocity[d] = 0.1 * (2.0 * uniform01(rng) - 1.0) * space.width(d);
    }
    positions.push_back(p.position);
  }
  std::vector<double> values(swarm_size);
  evaluate_batch(execution, objective, positions, values);

  state.global_best_value = values[0];
  state.global_best = state.particles[0].position;
  for (std::size_t i = 0; i < swarm_size; ++i) {
    Particle& p = state.particles[i];
    p.value = p.best_value = values[i];
    p.best_position = p.position;
    if (p.best_value < state.global_best_value) {
      state.global_best_value = p.best_value;
      state.global_best = p.best_position;
    }
  }
  state.evaluations = swarm_size;
  return state;
}

void cfpso_step(SwarmState& state, const SearchSpace& space, const CfPsoParams& params,
                const Objective& objective, Rng& rng) {
  const double k = params.k();
  swarm_step(
      state, space, params.c1, params.c2, params.coefficients, params.boundary, params.execution,
      [k](double v, double cognitive, double social) { return k * (v + cognitive + social); },
      objective, rng);
}

void iwpso_step(SwarmState& state, const SearchSpace& space, const IwPsoParams& params,
                const Objective& objective, Rng& rng) {
  const double w = params.w;
  swarm_step(
      state, space, params.c1, params.c2, params.coefficients, params.boundary, params.execution,
      [w](double v, double cognitive, double social) { return w * v + cognitive + social; },
      objective, rng);
}

} // namespace mphase::optim
