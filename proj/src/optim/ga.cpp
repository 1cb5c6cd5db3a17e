#include "mphase/optim/ga.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mphase::optim {

void GaParams::validate() const {
  if (population_size < 2)
    throw std::invalid_argument("GA population must hold at least two individuals");
  auto rate = [](double r) { return r >= 0.0 && r <= 1.0; };
  if (!rate(crossover_rate) || !rate(mutation_rate))
    throw std::invalid_argument("GA rates must lie in [0, 1]");
  if (tournament_size < 1)
    throw std::invalid_argument("tournament size must be at least 1");
  if (!(blend_alpha >= 0.0) || !(mutation_scale >= 0.0))
    throw std::invalid_argument("blend alpha and mutation scale must be nonnegative");
}

namespace {

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::size_t tournament(const std::vector<Individual>& pop, std::size_t size, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, pop.size() - 1);
  std::size_t winner = pick(rng);
  for (std::size_t t = 1; t < size; ++t) {
    const std::size_t challenger = pick(rng);
    if (pop[challenger].value < pop[winner].value)
      winner = challenger;
  }
  return winner;
}

std::size_t best_index(const std::vector<Individual>& pop) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < pop.size(); ++i)
    if (pop[i].value < pop[best].value)
      best = i;
  return best;
}

} // namespace

Population initialize_population(const SearchSpace& space, const GaParams& params,
                                 const Objective& objective, Rng& rng) {
  params.validate();
  Population pop;
  std::vector<std::vector<double>> genes(params.population_size);
  for (auto& g : genes) {
    g.resize(space.dimension());
    for (std::size_t d = 0; d < g.size(); ++d)
      g[d] = space.lower()[d] + uniform(rng, 0.0, 1.0) * space.width(d);
  }
  std::vector<double> values(genes.size());
  evaluate_batch(params.execution, objective, genes, values);
  for (std::size_t i = 0; i < genes.size(); ++i)
    pop.individuals.push_back(Individual{std::move(genes[i]), values[i]});
  const std::size_t best = best_index(pop.individuals);
  pop.best = pop.individuals[best].genes;
  pop.best_value = pop.individuals[best].value;
  pop.evaluations = params.population_size;
  return pop;
}

void ga_step(Population& pop, const SearchSpace& space, const GaParams& params,
             const Objective& objective, Rng& rng) {
  const std::size_t n = space.dimension();
  const auto& parents = pop.individuals;

  std::vector<std::vector<double>> offspring;
  offspring.reserve(params.population_size - 1);
  while (offspring.size() + 1 < params.population_size) {
    const auto& a = parents[tournament(parents, params.tournament_size, rng)].genes;
    const auto& b = parents[tournament(parents, params.tournament_size, rng)].genes;
    std::vector<double> child = a;
    if (uniform(rng, 0.0, 1.0) < params.crossover_rate) {
      for (std::size_t d = 0; d < n; ++d) {
        const double lo = std::min(a[d], b[d]);
        const double hi = std::max(a[d], b[d]);
        const double spread = params.blend_alpha * (hi - lo);
        child[d] = hi > lo ? uniform(rng, lo - spread, hi + spread) : lo;
      }
    }
    for (std::size_t d = 0; d < n; ++d) {
      if (uniform(rng, 0.0, 1.0) < params.mutation_rate && params.mutation_scale > 0.0) {
        std::normal_distribution<double> noise(0.0, params.mutation_scale * space.width(d));
        child[d] += noise(rng);
      }
      child[d] = std::clamp(child[d], space.lower()[d], space.upper()[d]);
    }
    offspring.push_back(std::move(child));
  }

  std::vector<double> values(offspring.size());
  evaluate_batch(params.execution, objective, offspring, values);

  std::vector<Individual> next;
  next.reserve(params.population_size);
  next.push_back(parents[best_index(parents)]); // elite
  for (std::size_t i = 0; i < offspring.size(); ++i)
    next.push_back(Individual{std::move(offspring[i]), values[i]});
  pop.individuals = std::move(next);

  const double previous = pop.best_value;
  const std::size_t best = best_index(pop.individuals);
  if (pop.individuals[best].value < pop.best_value) {
    pop.best_value = pop.individuals[best].value;
    pop.best = pop.individuals[best].genes;
  }
  pop.evaluations += values.size();
  ++pop.generation;
  pop.history.push_back(pop.best_value);
  if (previous - pop.best_value > kImprovementThreshold)
    pop.stall = 0;
  else
    ++pop.stall;
}

} // namespace mphase::optim
