#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mphase/feeder/phase.hpp"

namespace mphase {

using Complex = std::complex<double>;

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class NotRadial : public Error {
public:
  using Error::Error;
};

/// Square complex matrix of dimension 1..3 stored row-major.
class ImpedanceMatrix {
public:
  ImpedanceMatrix() = default;
  explicit ImpedanceMatrix(std::size_t dim);
  static ImpedanceMatrix diagonal(std::size_t dim, Complex value);

  std::size_t dim() const { return dim_; }
  Complex& operator()(std::size_t r, std::size_t c) { return values_[r * 3 + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return values_[r * 3 + c]; }

  bool is_symmetric() const;
  Complex determinant() const;

  bool operator==(const ImpedanceMatrix& other) const;

private:
  std::size_t dim_ = 0;
  std::array<Complex, 9> values_{};
};

struct Bus {
  std::string id;
  PhaseSet phases;
  double nominal_voltage = 0.0; // line-to-neutral volts
  bool is_source = false;

  bool operator==(const Bus&) const = default;
};

inline constexpr double kUnlimitedAmpacity = std::numeric_limits<double>::infinity();

struct LineSegment {
  std::string id;
  std::string from_bus;
  std::string to_bus;
  PhaseSet phases;
  ImpedanceMatrix z; // ohms, Kron-reduced
  double ampacity = kUnlimitedAmpacity;
  std::optional<double> length_m;

  bool operator==(const LineSegment&) const = default;
};

struct Transformer {
  std::string id;
  std::string from_bus;
  std::string to_bus;
  PhaseSet phases;
  double rating_kva = 0.0;
  Complex series_impedance_pu{0.0, 0.0}; // on own rating, referred to the to-side
  double tap = 1.0;

  bool operator==(const Transformer&) const = default;
};

enum class LoadConnection { wye, delta };
enum class LoadModel { constant_pq, constant_z, constant_i };

/// Per-phase values follow the canonical phase order. For delta loads on
/// three phases the entries are the AB, BC, CA branches; on two phases the
/// two entries are summed onto the single line-to-line branch.
struct Load {
  std::string id;
  std::string bus;
  PhaseSet phases;
  LoadConnection connection = LoadConnection::wye;
  LoadModel model = LoadModel::constant_pq;
  std::vector<double> per_phase_kw;
  std::vector<double> per_phase_kvar;

  bool operator==(const Load&) const = default;
};

struct CapacitorBank {
  std::string id;
  std::string bus;
  PhaseSet phases;
  std::vector<double> per_phase_kvar; // rated at nominal voltage
  bool enabled = true;

  bool operator==(const CapacitorBank&) const = default;
};

/// Fixed-tap step-voltage regulator at the sending end of a line segment.
struct Regulator {
  std::string id;
  std::string on_segment;
  PhaseSet phases;
  std::vector<double> per_phase_tap;

  bool operator==(const Regulator&) const = default;
};

inline constexpr double kRegulatorTapMin = 0.9;
inline constexpr double kRegulatorTapMax = 1.1;

/// Constant-P unity power factor generator, output split equally across phases.
struct DGUnit {
  std::string id;
  std::string bus;
  PhaseSet phases;
  double p_min_kw = 0.0;
  double p_max_kw = 0.0;
  double capacity_kw = 0.0;

  static constexpr double power_factor = 1.0;

  bool operator==(const DGUnit&) const = default;
};

struct VoltageLimits {
  double min_pu = 0.94;
  double max_pu = 1.06;

  bool operator==(const VoltageLimits&) const = default;
};

struct NetworkElements {
  std::string name;
  std::vector<Bus> buses;
  std::vector<LineSegment> segments;
  std::vector<Transformer> transformers;
  std::vector<Load> loads;
  std::vector<CapacitorBank> capacitors;
  std::vector<Regulator> regulators;
  std::vector<DGUnit> dg_units;
  VoltageLimits limits;

  bool operator==(const NetworkElements&) const = default;
};

enum class BranchKind { segment, transformer };

/// Branches are addressed by a flat index: segments first, then transformers.
struct BranchRef {
  BranchKind kind;
  std::size_t index; // into segments() or transformers()

  bool operator==(const BranchRef&) const = default;
};

/// Immutable multi-phase radial feeder. Element collections are kept sorted
/// by id so two networks with the same content compare equal regardless of
/// declaration order.
class PhasedNetwork {
public:
  PhasedNetwork() = default;
  explicit PhasedNetwork(NetworkElements elements);

  const NetworkElements& elements() const { return elements_; }
  const std::string& name() const { return elements_.name; }
  const std::vector<Bus>& buses() const { return elements_.buses; }
  const std::vector<LineSegment>& segments() const { return elements_.segments; }
  const std::vector<Transformer>& transformers() const { return elements_.transformers; }
  const std::vector<Load>& loads() const { return elements_.loads; }
  const std::vector<CapacitorBank>& capacitors() const { return elements_.capacitors; }
  const std::vector<Regulator>& regulators() const { return elements_.regulators; }
  const std::vector<DGUnit>& dg_units() const { return elements_.dg_units; }
  const VoltageLimits& limits() const { return elements_.limits; }

  std::optional<std::size_t> find_bus(std::string_view id) const;
  std::optional<BranchRef> find_branch(std::string_view id) const;

  std::size_t branch_count() const { return segments().size() + transformers().size(); }
  std::size_t flat_index(BranchRef ref) const;
  BranchRef branch_at(std::size_t flat) const;
  const std::string& branch_id(BranchRef ref) const;
  const std::string& branch_from(BranchRef ref) const;
  const std::string& branch_to(BranchRef ref) const;
  PhaseSet branch_phases(BranchRef ref) const;

  /// Index of the unique source bus, if exactly one exists.
  std::optional<std::size_t> source_bus() const;

  /// Copy with DG capacities replaced (same order as dg_units()).
  PhasedNetwork with_dg_capacities(std::span<const double> capacity_kw) const;

  bool operator==(const PhasedNetwork& other) const { return elements_ == other.elements_; }

private:
  NetworkElements elements_;
  std::unordered_map<std::string, std::size_t> bus_index_;
  std::unordered_map<std::string, BranchRef> branch_index_;
};

struct Violation {
  std::string element_id;
  std::string reason;

  bool operator==(const Violation&) const = default;
};

using ValidationReport = std::vector<Violation>;

/// Every invariant violation, sorted by element id then reason.
ValidationReport validate(const PhasedNetwork& network);

/// Branches ordered parent-before-child from the source bus; children of a bus
/// are visited in branch-id order. Throws NotRadial on a cycle, a reversed
/// branch or an unreachable bus.
std::vector<BranchRef> radial_order(const PhasedNetwork& network);

} // namespace mphase
