#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mphase/feeder/network.hpp"

namespace mphase {

class SingularElement : public Error {
public:
  using Error::Error;
};

class NotConverged : public Error {
public:
  using Error::Error;
};

/// Per-phase complex quantity indexed by slot(Phase); absent phases hold 0.
using PhaseVector = std::array<Complex, 3>;

struct SolverSettings {
  double tolerance_pu = 1e-4; // max per-phase voltage change, per unit of bus nominal
  int max_iterations = 100;
  bool flat_start = true;

  void validate() const;
};

struct PowerFlowSolution {
  std::vector<PhaseVector> bus_voltages;           // network bus order, line-to-neutral volts
  std::vector<PhaseVector> branch_currents;        // flat branch order, series (to-side) amps
  std::vector<PhaseVector> branch_from_currents;   // flat branch order, sending-end amps
  std::vector<Complex> bus_load_power;             // VA drawn by loads and capacitors at each bus
  std::vector<double> bus_dg_power;                // W injected by DG units at each bus
  Complex source_power{0.0, 0.0};                  // VA delivered by the source bus
  bool converged = false;
  int iterations = 0;
  double max_mismatch_pu = 0.0;
};

/// Forward-backward sweep solver bound to one network. The compiled topology
/// is immutable, so `solve` may be called concurrently from several threads.
class SweepSolver {
public:
  /// Throws NotRadial for meshed or disconnected networks and
  /// SingularElement for non-invertible branch impedances.
  explicit SweepSolver(const PhasedNetwork& network);

  const PhasedNetwork& network() const { return *network_; }

  /// `dg_capacity_kw` overrides the network's DG capacities when non-empty.
  /// `initial_voltages` is used instead of a flat start when settings.flat_start
  /// is false and the span is non-empty.
  PowerFlowSolution solve(const SolverSettings& settings,
                          std::span<const double> dg_capacity_kw = {},
                          std::span<const PhaseVector> initial_voltages = {}) const;

  /// Voltage ratio applied at the sending end of a flat branch (transformer
  /// turns ratio times tap, or regulator taps; 1 for plain lines).
  const PhaseVector& branch_ratio(std::size_t flat) const { return ratios_[flat]; }

  /// Series impedance matrix of a flat branch in ohms, referred to the to-side.
  const ImpedanceMatrix& branch_impedance(std::size_t flat) const { return impedances_[flat]; }

private:
  struct Branch {
    std::size_t flat;
    std::size_t from;
    std::size_t to;
    PhaseSet phases;
  };
  struct Injection {
    std::size_t bus;
    Phase p;
    Phase q;        // equal to p for wye elements
    Complex power;  // VA drawn at nominal voltage
    int exponent;   // 0 constant power, 1 constant current, 2 constant impedance
    double v_nominal;
    bool line_to_line;
  };
  struct Generator {
    std::size_t bus;
    PhaseSet phases;
  };

  void compute_injections(const std::vector<PhaseVector>& v, std::span<const double> dg_kw,
                          std::vector<PhaseVector>& current, std::vector<Complex>* load_power,
                          std::vector<double>* dg_power) const;
  void backward(const std::vector<PhaseVector>& injection, std::vector<PhaseVector>& series,
                std::vector<PhaseVector>& sending) const;
  void forward(const std::vector<PhaseVector>& series, std::vector<PhaseVector>& v) const;

  const PhasedNetwork* network_;
  std::vector<Branch> order_;
  std::vector<PhaseVector> ratios_;
  std::vector<ImpedanceMatrix> impedances_;
  std::vector<Injection> injections_;
  std::vector<Generator> generators_;
  std::size_t source_ = 0;
  PhaseVector source_voltage_{};
};

/// One-shot convenience wrapper around SweepSolver.
PowerFlowSolution solve(const PhasedNetwork& network, const SolverSettings& settings = {});

struct VoltageViolation {
  std::string bus;
  Phase phase;
  double v_pu;

  bool operator==(const VoltageViolation&) const = default;
};

struct AmpacityViolation {
  std::string branch;
  Phase phase;
  double amps;
  double limit;

  bool operator==(const AmpacityViolation&) const = default;
};

struct LimitReport {
  std::vector<VoltageViolation> voltage_violations;
  std::vector<AmpacityViolation> ampacity_violations;
  double min_v_pu = 0.0;
  double max_v_pu = 0.0;

  bool clean() const { return voltage_violations.empty() && ampacity_violations.empty(); }
};

/// Voltage limits from the network and strict ampacity limits on line
/// segments (|I| >= ampacity is a violation). Throws NotConverged.
LimitReport check_limits(const PhasedNetwork& network, const PowerFlowSolution& solution);

/// Per-unit magnitude of every bus phase present in the network.
double voltage_pu(const PhasedNetwork& network, const PowerFlowSolution& solution,
                  std::size_t bus, Phase phase);

} // namespace mphase
