// Serial reference kernel vs OpenMP kernel on a batch of planner fitness
// evaluations. Batch size is the swarm size of one optimizer step.
#include <benchmark/benchmark.h>

#include <random>

#include "mphase/feeder/parser.hpp"
#include "mphase/optim/evaluate.hpp"
#include "mphase/planner/planner.hpp"

namespace {

struct Workload {
  mphase::PhasedNetwork network = mphase::load_feeder(MPHASE_SAMPLE_FEEDER);
  mphase::PlannerConfig config;
  mphase::FitnessFunction fitness{network, config.penalties, config.solver};
  std::vector<std::vector<double>> batch(std::size_t n) const {
    std::mt19937_64 rng(7);
    std::vector<std::vector<double>> points(n);
    for (auto& p : points)
      for (const auto& u : network.dg_units())
        p.push_back(std::uniform_real_distribution<double>(u.p_min_kw, u.p_max_kw)(rng));
    return points;
  }
};

const Workload& workload() {
  static const Workload w;
  return w;
}

template <bool Parallel> void batch_fitness(benchmark::State& state) {
  const auto& w = workload();
  const auto points = w.batch(static_cast<std::size_t>(state.range(0)));
  std::vector<double> values(points.size());
  const mphase::optim::Objective objective = [&](std::span<const double> x) { return w.fitness(x); };
  for (auto _ : state) {
    if constexpr (Parallel)
      mphase::optim::evaluate_batch_parallel(objective, points, values);
    else
      mphase::optim::evaluate_batch_serial(objective, points, values);
    benchmark::DoNotOptimize(values.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.counters["threads"] = Parallel ? mphase::optim::parallel_threads() : 1;
}

} // namespace

BENCHMARK(batch_fitness<false>)->Name("fitness_batch/serial")->Arg(20)->Arg(50)->Arg(200);
BENCHMARK(batch_fitness<true>)->Name("fitness_batch/openmp")->Arg(20)->Arg(50)->Arg(200);

BENCHMARK_MAIN();
