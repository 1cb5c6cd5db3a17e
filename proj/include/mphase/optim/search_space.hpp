#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace mphase::optim {

/// Box-bounded continuous search space. Each dimension must have a width
/// larger than 1e-9 of its magnitude (and of 1), so degenerate boxes are rejected.
class SearchSpace {
public:
  SearchSpace(std::vector<double> lower, std::vector<double> upper);

  std::size_t dimension() const { return lower_.size(); }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  double width(std::size_t d) const { return upper_[d] - lower_[d]; }
  bool contains(std::span<const double> x) const;

  /// Minimum admissible width for a dimension with the given bounds.
  static double min_width(double lower, double upper);

private:
  std::vector<double> lower_;
  std::vector<double> upper_;
};

/// Black-box objective. Must be a pure function of the position when batch
/// evaluation runs in parallel.
using Objective = std::function<double(std::span<const double>)>;

using Rng = std::mt19937_64;

/// Value assigned to positions whose evaluation threw or returned NaN.
inline constexpr double kFailedEvaluation = 1.7976931348623157e308;

/// Minimum decrease of the global best that resets the stall counter.
inline constexpr double kImprovementThreshold = 1e-9;

} // namespace mphase::optim
