#include "mphase/optim/search_space.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mphase::optim {

double SearchSpace::min_width(double lower, double upper) {
  return 1e-9 * std::max({1.0, std::abs(lower), std::abs(upper)});
}

SearchSpace::SearchSpace(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size())
    throw std::invalid_argument("search space bounds differ in length");
  if (lower_.empty())
    throw std::invalid_argument("search space must have at least one dimension");
  for (std::size_t d = 0; d < lower_.size(); ++d) {
    if (!std::isfinite(lower_[d]) || !std::isfinite(upper_[d]))
      throw std::invalid_argument("search space bounds must be finite");
    if (!(upper_[d] - lower_[d] > min_width(lower_[d], upper_[d])))
      throw std::invalid_argument("search space dimension " + std::to_string(d) +
                                  " has lower bound not below upper bound");
  }
}

bool SearchSpace::contains(std::span<const double> x) const {
  if (x.size() != dimension())
    return false;
  for (std::size_t d = 0; d < x.size(); ++d)
    if (!(x[d] >= lower_[d] && x[d] <= upper_[d]))
      return false;
  return true;
}

} // namespace mphase::optim
