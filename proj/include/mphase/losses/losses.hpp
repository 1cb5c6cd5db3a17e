#pragma once

#include <map>
#include <string>
#include <string_view>

#include "mphase/powerflow/solver.hpp"

namespace mphase {

class UnknownBranch : public Error {
public:
  using Error::Error;
};

/// Active power losses of a solved feeder, in kW.
struct LossBreakdown {
  std::map<std::string, double> per_branch_kw; // lines and transformers by id
  double line_loss_kw = 0.0;
  double transformer_loss_kw = 0.0;
  double total_loss_kw = 0.0;
  double load_power_kw = 0.0; // consumed at solved voltages, capacitors excluded
  double loss_percent = 0.0;  // 100 * total / load, 0 when there is no load
};

/// Real power entering a branch minus real power leaving it:
/// Re(sum_p V_from,p conj(I_from,p) - V_to,p conj(I_p)).
/// On mutually coupled lines this differs from the per-phase |I|^2 R sum.
/// Throws UnknownBranch or NotConverged.
double segment_loss(const PhasedNetwork& network, const PowerFlowSolution& solution,
                    std::string_view branch_id);

/// Throws NotConverged.
LossBreakdown total_loss(const PhasedNetwork& network, const PowerFlowSolution& solution);

/// Planner objective: total loss in MW, squared. Minimizing it has the same
/// argmin as minimizing the loss itself whenever losses are nonnegative.
double loss_squared(const LossBreakdown& loss);

} // namespace mphase
