#include "mphase/feeder/network.hpp"

#include <algorithm>
#include <cmath>

namespace mphase {

ImpedanceMatrix::ImpedanceMatrix(std::size_t dim) : dim_(dim) {
  if (dim < 1 || dim > 3)
    throw std::invalid_argument("impedance matrix dimension must be 1, 2 or 3");
}

ImpedanceMatrix ImpedanceMatrix::diagonal(std::size_t dim, Complex value) {
  ImpedanceMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i)
    m(i, i) = value;
  return m;
}

bool ImpedanceMatrix::is_symmetric() const {
  double scale = 0.0;
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c)
      scale = std::max(scale, std::abs((*this)(r, c)));
  const double tol = 1e-12 * scale;
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = r + 1; c < dim_; ++c)
      if (std::abs((*this)(r, c) - (*this)(c, r)) > tol)
        return false;
  return true;
}

Complex ImpedanceMatrix::determinant() const {
  const auto& m = *this;
  switch (dim_) {
  case 1:
    return m(0, 0);
  case 2:
    return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  case 3:
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
           m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
  default:
    return {0.0, 0.0};
  }
}

bool ImpedanceMatrix::operator==(const ImpedanceMatrix& other) const {
  if (dim_ != other.dim_)
    return false;
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c)
      if ((*this)(r, c) != other(r, c))
        return false;
  return true;
}

namespace {

template <typename T> void sort_by_id(std::vector<T>& items) {
  std::stable_sort(items.begin(), items.end(),
                   [](const T& a, const T& b) { return a.id < b.id; });
}

} // namespace

PhasedNetwork::PhasedNetwork(NetworkElements elements) : elements_(std::move(elements)) {
  if (elements_.name.empty())
    elements_.name = "feeder";
  sort_by_id(elements_.buses);
  sort_by_id(elements_.segments);
  sort_by_id(elements_.transformers);
  sort_by_id(elements_.loads);
  sort_by_id(elements_.capacitors);
  sort_by_id(elements_.regulators);
  sort_by_id(elements_.dg_units);

  for (std::size_t i = 0; i < elements_.buses.size(); ++i)
    bus_index_.emplace(elements_.buses[i].id, i);
  for (std::size_t i = 0; i < elements_.segments.size(); ++i)
    branch_index_.emplace(elements_.segments[i].id, BranchRef{BranchKind::segment, i});
  for (std::size_t i = 0; i < elements_.transformers.size(); ++i)
    branch_index_.emplace(elements_.transformers[i].id, BranchRef{BranchKind::transformer, i});
}

std::optional<std::size_t> PhasedNetwork::find_bus(std::string_view id) const {
  auto it = bus_index_.find(std::string(id));
  if (it == bus_index_.end())
    return std::nullopt;
  return it->second;
}

std::optional<BranchRef> PhasedNetwork::find_branch(std::string_view id) const {
  auto it = branch_index_.find(std::string(id));
  if (it == branch_index_.end())
    return std::nullopt;
  return it->second;
}

std::size_t PhasedNetwork::flat_index(BranchRef ref) const {
  return ref.kind == BranchKind::segment ? ref.index : segments().size() + ref.index;
}

BranchRef PhasedNetwork::branch_at(std::size_t flat) const {
  if (flat < segments().size())
    return {BranchKind::segment, flat};
  return {BranchKind::transformer, flat - segments().size()};
}

const std::string& PhasedNetwork::branch_id(BranchRef ref) const {
  return ref.kind == BranchKind::segment ? segments()[ref.index].id
                                         : transformers()[ref.index].id;
}

const std::string& PhasedNetwork::branch_from(BranchRef ref) const {
  return ref.kind == BranchKind::segment ? segments()[ref.index].from_bus
                                         : transformers()[ref.index].from_bus;
}

const std::string& PhasedNetwork::branch_to(BranchRef ref) const {
  return ref.kind == BranchKind::segment ? segments()[ref.index].to_bus
                                         : transformers()[ref.index].to_bus;
}

PhaseSet PhasedNetwork::branch_phases(BranchRef ref) const {
  return ref.kind == BranchKind::segment ? segments()[ref.index].phases
                                         : transformers()[ref.index].phases;
}

std::optional<std::size_t> PhasedNetwork::source_bus() const {
  std::optional<std::size_t> found;
  for (std::size_t i = 0; i < buses().size(); ++i) {
    if (!buses()[i].is_source)
      continue;
    if (found)
      return std::nullopt;
    found = i;
  }
  return found;
}

PhasedNetwork PhasedNetwork::with_dg_capacities(std::span<const double> capacity_kw) const {
  if (capacity_kw.size() != dg_units().size())
    throw std::invalid_argument("capacity vector length does not match DG unit count");
  PhasedNetwork copy = *this;
  for (std::size_t i = 0; i < capacity_kw.size(); ++i)
    copy.elements_.dg_units[i].capacity_kw = capacity_kw[i];
  return copy;
}

} // namespace mphase
