#include <algorithm>
#include <cmath>
#include <limits>

#include "mphase/powerflow/solver.hpp"

namespace mphase {

double voltage_pu(const PhasedNetwork& network, const PowerFlowSolution& solution,
                  std::size_t bus, Phase phase) {
  return std::abs(solution.bus_voltages[bus][slot(phase)]) / network.buses()[bus].nominal_voltage;
}

LimitReport check_limits(const PhasedNetwork& network, const PowerFlowSolution& solution) {
  if (!solution.converged)
    throw NotConverged("limit check needs a converged power-flow solution");

  LimitReport report;
  report.min_v_pu = std::numeric_limits<double>::infinity();
  report.max_v_pu = -std::numeric_limits<double>::infinity();
  const VoltageLimits& limits = network.limits();

  for (std::size_t b = 0; b < network.buses().size(); ++b) {
    const Bus& bus = network.buses()[b];
    for (Phase p : kAllPhases) {
      if (!bus.phases.contains(p))
        continue;
      const double pu = voltage_pu(network, solution, b, p);
      report.min_v_pu = std::min(report.min_v_pu, pu);
      report.max_v_pu = std::max(report.max_v_pu, pu);
      if (pu < limits.min_pu || pu > limits.max_pu)
        report.voltage_violations.push_back({bus.id, p, pu});
    }
  }

  for (std::size_t s = 0; s < network.segments().size(); ++s) {
    const LineSegment& seg = network.segments()[s];
    const std::size_t flat = network.flat_index({BranchKind::segment, s});
    for (Phase p : kAllPhases) {
      if (!seg.phases.contains(p))
        continue;
      const double amps = std::abs(solution.branch_currents[flat][slot(p)]);
      if (amps >= seg.ampacity)
        report.ampacity_violations.push_back({seg.id, p, amps, seg.ampacity});
    }
  }

  if (network.buses().empty())
    report.min_v_pu = report.max_v_pu = 0.0;
  return report;
}

} // namespace mphase
