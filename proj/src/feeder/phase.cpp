#include "mphase/feeder/phase.hpp"

#include <bit>
#include <stdexcept>

namespace mphase {

char phase_letter(Phase p) { return static_cast<char>('a' + slot(p)); }

PhaseSet PhaseSet::from_mask(std::uint8_t mask) {
  if (mask == 0 || mask > 0b111)
    throw std::invalid_argument("phase set must be a nonempty subset of {a,b,c}");
  return PhaseSet(mask);
}

std::optional<PhaseSet> PhaseSet::parse(std::string_view text) {
  if (text.empty() || text.size() > 3)
    return std::nullopt;
  std::uint8_t mask = 0;
  for (char c : text) {
    int bit = -1;
    if (c == 'a' || c == 'A') bit = 0;
    else if (c == 'b' || c == 'B') bit = 1;
    else if (c == 'c' || c == 'C') bit = 2;
    if (bit < 0 || (mask >> bit) & 1u)
      return std::nullopt;
    mask |= static_cast<std::uint8_t>(1u << bit);
  }
  return PhaseSet(mask);
}

std::size_t PhaseSet::size() const { return static_cast<std::size_t>(std::popcount(mask_)); }

std::size_t PhaseSet::index_of(Phase p) const {
  const auto below = static_cast<std::uint8_t>(mask_ & ((1u << slot(p)) - 1u));
  return static_cast<std::size_t>(std::popcount(below));
}

Phase PhaseSet::at(std::size_t i) const {
  for (Phase p : kAllPhases) {
    if (!contains(p))
      continue;
    if (i == 0)
      return p;
    --i;
  }
  throw std::out_of_range("phase index out of range");
}

std::string PhaseSet::to_string() const {
  std::string out;
  for (Phase p : kAllPhases)
    if (contains(p))
      out.push_back(phase_letter(p));
  return out;
}

} // namespace mphase
