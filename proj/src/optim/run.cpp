#include "mphase/optim/run.hpp"

namespace mphase::optim {

namespace {

template <typename... Ts> struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <typename... Ts> Overloaded(Ts...) -> Overloaded<Ts...>;

bool stalled(std::size_t stall, std::size_t limit) { return limit > 0 && stall >= limit; }

template <typename Params, typename Step>
OptimizationResult run_swarm(const char* name, const SearchSpace& space, const Params& params,
                             const Objective& objective, Step step) {
  params.validate();
  Rng rng(params.seed);
  SwarmState state = initialize_swarm(space, params.swarm_size, objective, rng, params.execution);
  OptimizationResult result;
  result.engine = name;
  result.initial_value = state.global_best_value;
  while (state.iteration < params.max_iterations && !stalled(state.stall, params.stall_iterations))
    step(state, space, params, objective, rng);
  result.best_x = state.global_best;
  result.best_value = state.global_best_value;
  result.history = std::move(state.history);
  result.iterations = state.iteration;
  result.evaluations = state.evaluations;
  return result;
}

} // namespace

std::string engine_name(const EngineParams& params) {
  return std::visit(Overloaded{[](const CfPsoParams&) { return std::string("cfpso"); },
                               [](const IwPsoParams&) { return std::string("iwpso"); },
                               [](const GaParams&) { return std::string("ga"); }},
                    params);
}

std::uint64_t engine_seed(const EngineParams& params) {
  return std::visit([](const auto& p) { return p.seed; }, params);
}

OptimizationResult run(const SearchSpace& space, const EngineParams& params,
                       const Objective& objective) {
  return std::visit(
      Overloaded{
          [&](const CfPsoParams& p) { return run_swarm("cfpso", space, p, objective, cfpso_step); },
          [&](const IwPsoParams& p) { return run_swarm("iwpso", space, p, objective, iwpso_step); },
          [&](const GaParams& p) {
            Rng rng(p.seed);
            Population pop = initialize_population(space, p, objective, rng);
            OptimizationResult result;
            result.engine = "ga";
            result.initial_value = pop.best_value;
            while (pop.generation < p.max_generations && !stalled(pop.stall, p.stall_generations))
              ga_step(pop, space, p, objective, rng);
            result.best_x = pop.best;
            result.best_value = pop.best_value;
            result.history = std::move(pop.history);
            result.iterations = pop.generation;
            result.evaluations = pop.evaluations;
            return result;
          }},
      params);
}

} // namespace mphase::optim
