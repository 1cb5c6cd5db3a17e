#include <charconv>
#include <sstream>
#include <stdexcept>

#include "mphase/feeder/parser.hpp"
#include "mphase/planner/report.hpp"

namespace mphase {

const ReportRow* ScenarioReport::find(std::string_view metric) const {
  for (const auto& row : rows)
    if (row.metric == metric)
      return &row;
  return nullptr;
}

namespace {

double loss_percent(const LossBreakdown& loss) {
  return loss.load_power_kw > 0.0 ? 100.0 * loss.total_loss_kw / loss.load_power_kw : 0.0;
}

} // namespace

ScenarioReport compare_report(const LossBreakdown& base, const LossBreakdown& optimized,
                              VoltageExtrema base_voltage, VoltageExtrema optimized_voltage) {
  ScenarioReport r;
  r.rows = {
      {"line_loss_mw", base.line_loss_kw / 1000.0, optimized.line_loss_kw / 1000.0},
      {"transformer_loss_mw", base.transformer_loss_kw / 1000.0, optimized.transformer_loss_kw / 1000.0},
      {"total_loss_mw", base.total_loss_kw / 1000.0, optimized.total_loss_kw / 1000.0},
      {"load_power_mw", base.load_power_kw / 1000.0, optimized.load_power_kw / 1000.0},
      {"loss_percent", loss_percent(base), loss_percent(optimized)},
      {"v_min_pu", base_voltage.min_pu, optimized_voltage.min_pu},
      {"v_max_pu", base_voltage.max_pu, optimized_voltage.max_pu},
  };
  r.loss_reduction_kw = base.total_loss_kw - optimized.total_loss_kw;
  r.loss_reduction_points = loss_percent(base) - loss_percent(optimized);
  r.loss_reduction_percent =
      base.total_loss_kw > 0.0 ? 100.0 * r.loss_reduction_kw / base.total_loss_kw : 0.0;
  return r;
}

ScenarioReport compare_report(const DGPlanResult& result) {
  return compare_report(result.base_loss, result.optimized_loss,
                        {result.base_limits.min_v_pu, result.base_limits.max_v_pu},
                        {result.optimized_limits.min_v_pu, result.optimized_limits.max_v_pu});
}

std::string report_csv(const ScenarioReport& report) {
  std::ostringstream out;
  out << "metric,base,optimized\n";
  for (const auto& row : report.rows)
    out << row.metric << ',' << format_number(row.base) << ',' << format_number(row.optimized) << '\n';
  out << "loss_reduction_kw,," << format_number(report.loss_reduction_kw) << '\n';
  out << "loss_reduction_points,," << format_number(report.loss_reduction_points) << '\n';
  out << "loss_reduction_percent,," << format_number(report.loss_reduction_percent) << '\n';
  return out.str();
}

namespace {

double parse_cell(std::string_view text) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw std::invalid_argument("bad number in report: " + std::string(text));
  return v;
}

} // namespace

ScenarioReport parse_report_csv(std::string_view csv) {
  ScenarioReport r;
  std::istringstream in{std::string(csv)};
  std::string line;
  if (!std::getline(in, line) || line != "metric,base,optimized")
    throw std::invalid_argument("report is missing its header");
  while (std::getline(in, line)) {
    if (line.empty())
      continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw std::invalid_argument("report row needs three columns: " + line);
    const std::string metric = line.substr(0, c1);
    const std::string_view base = std::string_view(line).substr(c1 + 1, c2 - c1 - 1);
    const double optimized = parse_cell(std::string_view(line).substr(c2 + 1));
    if (metric == "loss_reduction_kw")
      r.loss_reduction_kw = optimized;
    else if (metric == "loss_reduction_points")
      r.loss_reduction_points = optimized;
    else if (metric == "loss_reduction_percent")
      r.loss_reduction_percent = optimized;
    else
      r.rows.push_back({metric, parse_cell(base), optimized});
  }
  return r;
}

} // namespace mphase
