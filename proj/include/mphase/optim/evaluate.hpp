#pragma once

#include <span>
#include <vector>

#include "mphase/optim/search_space.hpp"

namespace mphase::optim {

enum class Execution { serial, parallel };

/// Reference kernel: evaluates every point in order on the calling thread.
void evaluate_batch_serial(const Objective& objective, std::span<const std::vector<double>> points,
                           std::span<double> values);

/// OpenMP kernel: one point per iteration of a parallel loop. Produces exactly
/// the values of the serial kernel because each slot is written once by a
/// pure evaluation. Falls back to the serial kernel without OpenMP.
void evaluate_batch_parallel(const Objective& objective, std::span<const std::vector<double>> points,
                             std::span<double> values);

void evaluate_batch(Execution execution, const Objective& objective,
                    std::span<const std::vector<double>> points, std::span<double> values);

/// Number of worker threads the parallel kernel will use.
int parallel_threads();

} // namespace mphase::optim
