#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mphase/planner/planner.hpp"

namespace mphase::cli {

/// Distance from the source along the branch chain, summing segment
/// length_m. Transformers count as zero length. Empty when any segment on
/// the path carries no length.
std::vector<std::optional<double>> distance_from_source(const PhasedNetwork& network);

/// bus,phase,v_real,v_imag,v_pu,dist_m then a `converged,<bool>` footer.
std::string voltages_csv(const PhasedNetwork& network, const PowerFlowSolution& solution);

/// branch,kind,phase,i_real,i_imag,i_amps,ampacity (series current; ampacity
/// blank when unlimited or for transformers) then the footer.
std::string currents_csv(const PhasedNetwork& network, const PowerFlowSolution& solution);

/// element,kind,kw: one row per branch, then the LossBreakdown totals, then
/// the footer.
std::string losses_csv(const LossBreakdown& loss, const PhasedNetwork& network, bool converged);

/// dg,bus,phases,p_min_kw,p_max_kw,capacity_kw
std::string plan_csv(const PhasedNetwork& network, const DGPlanResult& result);

/// iteration,engine,best_fitness; iteration 0 is the value after initialization.
std::string convergence_csv(const optim::OptimizationResult& optimization);

/// key=value lines. The wall_time_s line is the only non-deterministic one.
std::string summary_text(const PhasedNetwork& network, const DGPlanResult& result, double wall_time_s);

} // namespace mphase::cli
