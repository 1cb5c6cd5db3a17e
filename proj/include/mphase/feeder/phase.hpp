#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace mphase {

enum class Phase : std::uint8_t { A = 0, B = 1, C = 2 };

inline constexpr std::array<Phase, 3> kAllPhases{Phase::A, Phase::B, Phase::C};

constexpr std::size_t slot(Phase p) { return static_cast<std::size_t>(p); }
char phase_letter(Phase p);

/// Nonempty subset of {A, B, C}. Iteration and per-phase vectors always use
/// the canonical order A, B, C.
class PhaseSet {
public:
  /// Defaults to all three phases.
  constexpr PhaseSet() = default;

  /// Throws std::invalid_argument for an empty or out-of-range mask.
  static PhaseSet from_mask(std::uint8_t mask);

  /// Accepts any nonempty, duplicate-free combination of a/b/c (either case).
  static std::optional<PhaseSet> parse(std::string_view text);

  std::uint8_t mask() const { return mask_; }
  std::size_t size() const;
  bool contains(Phase p) const { return (mask_ >> slot(p)) & 1u; }
  bool is_subset_of(PhaseSet other) const { return (mask_ & ~other.mask_) == 0; }

  /// Position of `p` within the set (0-based, canonical order).
  /// Precondition: contains(p).
  std::size_t index_of(Phase p) const;

  /// Phase at canonical position `i` (0 <= i < size()).
  Phase at(std::size_t i) const;

  std::string to_string() const;

  bool operator==(const PhaseSet&) const = default;

private:
  explicit constexpr PhaseSet(std::uint8_t mask) : mask_(mask) {}
  std::uint8_t mask_ = 0b111;
};

} // namespace mphase
