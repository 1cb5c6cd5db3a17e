#include "mphase/optim/evaluate.hpp"

#include <cmath>
#include <stdexcept>

#ifdef MPHASE_HAVE_OPENMP
#include <omp.h>
#endif

namespace mphase::optim {

namespace {

double guarded(const Objective& objective, const std::vector<double>& x) {
  try {
    const double v = objective(x);
    return std::isnan(v) ? kFailedEvaluation : v;
  } catch (...) {
    return kFailedEvaluation;
  }
}

void check_sizes(std::span<const std::vector<double>> points, std::span<double> values) {
  if (points.size() != values.size())
    throw std::invalid_argument("batch evaluation needs one value slot per point");
}

} // namespace

void evaluate_batch_serial(const Objective& objective, std::span<const std::vector<double>> points,
                           std::span<double> values) {
  check_sizes(points, values);
  for (std::size_t i = 0; i < points.size(); ++i)
    values[i] = guarded(objective, points[i]);
}

void evaluate_batch_parallel(const Objective& objective, std::span<const std::vector<double>> points,
                             std::span<double> values) {
  check_sizes(points, values);
#ifdef MPHASE_HAVE_OPENMP
  const auto n = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    values[static_cast<std::size_t>(i)] = guarded(objective, points[static_cast<std::size_t>(i)]);
#else
  evaluate_batch_serial(objective, points, values);
#endif
}

void evaluate_batch(Execution execution, const Objective& objective,
                    std::span<const std::vector<double>> points, std::span<double> values) {
  if (execution == Execution::parallel)
    evaluate_batch_parallel(objective, points, values);
  else
    evaluate_batch_serial(objective, points, values);
}

int parallel_threads() {
#ifdef MPHASE_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

} // namespace mphase::optim
