#include <cmath>

#include "mphase/losses/losses.hpp"

namespace mphase {

namespace {

double branch_loss_kw(const PhasedNetwork& network, const PowerFlowSolution& solution,
                      BranchRef ref) {
  const std::size_t flat = network.flat_index(ref);
  const std::size_t from = *network.find_bus(network.branch_from(ref));
  const std::size_t to = *network.find_bus(network.branch_to(ref));
  const PhaseSet phases = network.branch_phases(ref);
  double watts = 0.0;
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const std::size_t p = slot(phases.at(i));
    const Complex in = solution.bus_voltages[from][p] * std::conj(solution.branch_from_currents[flat][p]);
    const Complex out = solution.bus_voltages[to][p] * std::conj(solution.branch_currents[flat][p]);
    watts += (in - out).real();
  }
  return watts / 1000.0;
}

} // namespace

double segment_loss(const PhasedNetwork& network, const PowerFlowSolution& solution,
                    std::string_view branch_id) {
  const auto ref = network.find_branch(branch_id);
  if (!ref)
    throw UnknownBranch("unknown branch " + std::string(branch_id));
  if (!solution.converged)
    throw NotConverged("loss accounting needs a converged power-flow solution");
  return branch_loss_kw(network, solution, *ref);
}

LossBreakdown total_loss(const PhasedNetwork& network, const PowerFlowSolution& solution) {
  if (!solution.converged)
    throw NotConverged("loss accounting needs a converged power-flow solution");
  LossBreakdown out;
  for (std::size_t i = 0; i < network.segments().size(); ++i) {
    const double kw = branch_loss_kw(network, solution, {BranchKind::segment, i});
    out.per_branch_kw[network.segments()[i].id] = kw;
    out.line_loss_kw += kw;
  }
  for (std::size_t i = 0; i < network.transformers().size(); ++i) {
    const double kw = branch_loss_kw(network, solution, {BranchKind::transformer, i});
    out.per_branch_kw[network.transformers()[i].id] = kw;
    out.transformer_loss_kw += kw;
  }
  out.total_loss_kw = out.line_loss_kw + out.transformer_loss_kw;
  for (const Complex& s : solution.bus_load_power)
    out.load_power_kw += s.real() / 1000.0;
  out.loss_percent = out.load_power_kw > 0.0 ? 100.0 * out.total_loss_kw / out.load_power_kw : 0.0;
  return out;
}

double loss_squared(const LossBreakdown& loss) {
  const double mw = loss.total_loss_kw / 1000.0;
  return mw * mw;
}

} // namespace mphase
