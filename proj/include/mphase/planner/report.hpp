#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mphase/planner/planner.hpp"

namespace mphase {

struct ReportRow {
  std::string metric;
  double base = 0.0;
  double optimized = 0.0;
};

/// Base case against optimized plan: loss rows in MW, loss percentage,
/// voltage extrema, and the loss reduction.
struct ScenarioReport {
  std::vector<ReportRow> rows; // line_loss_mw, transformer_loss_mw, total_loss_mw,
                               // load_power_mw, loss_percent, v_min_pu, v_max_pu
  double loss_reduction_kw = 0.0;
  double loss_reduction_points = 0.0;  // difference of the two loss percentages
  double loss_reduction_percent = 0.0; // relative to the base-case loss

  const ReportRow* find(std::string_view metric) const;
};

struct VoltageExtrema {
  double min_pu = 0.0;
  double max_pu = 0.0;
};

/// Loss percentages are recomputed from total_loss_kw and load_power_kw, so
/// only those two fields (and the line/transformer split) need to be set.
ScenarioReport compare_report(const LossBreakdown& base, const LossBreakdown& optimized,
                              VoltageExtrema base_voltage = {}, VoltageExtrema optimized_voltage = {});

ScenarioReport compare_report(const DGPlanResult& result);

/// `metric,base,optimized` with the reduction rows carrying only the
/// optimized column. Numbers use the shortest round-trip form.
std::string report_csv(const ScenarioReport& report);

/// Inverse of report_csv. Throws std::invalid_argument on malformed input.
ScenarioReport parse_report_csv(std::string_view csv);

} // namespace mphase
