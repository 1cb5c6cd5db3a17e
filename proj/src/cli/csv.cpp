#include <sstream>

#include "mphase/cli/artifacts.hpp"
#include "mphase/feeder/parser.hpp"

namespace mphase::cli {

namespace {

const char* footer(bool converged) { return converged ? "converged,true\n" : "converged,false\n"; }

std::string optional_number(std::optional<double> v) { return v ? format_number(*v) : std::string(); }

} // namespace

std::vector<std::optional<double>> distance_from_source(const PhasedNetwork& network) {
  std::vector<std::optional<double>> dist(network.buses().size());
  const auto source = network.source_bus();
  if (!source)
    return dist;
  dist[*source] = 0.0;
  for (BranchRef ref : radial_order(network)) {
    const std::size_t from = *network.find_bus(network.branch_from(ref));
    const std::size_t to = *network.find_bus(network.branch_to(ref));
    std::optional<double> length = 0.0;
    if (ref.kind == BranchKind::segment)
      length = network.segments()[ref.index].length_m;
    if (dist[from] && length)
      dist[to] = *dist[from] + *length;
  }
  return dist;
}

std::string voltages_csv(const PhasedNetwork& network, const PowerFlowSolution& solution) {
  std::vector<std::optional<double>> dist(network.buses().size());
  try {
    dist = distance_from_source(network);
  } catch (const NotRadial&) {
  }
  std::ostringstream out;
  out << "bus,phase,v_real,v_imag,v_pu,dist_m\n";
  for (std::size_t b = 0; b < network.buses().size(); ++b) {
    const Bus& bus = network.buses()[b];
    for (Phase p : kAllPhases) {
      if (!bus.phases.contains(p))
        continue;
      const Complex v = solution.bus_voltages[b][slot(p)];
      out << bus.id << ',' << phase_letter(p) << ',' << format_number(v.real()) << ','
          << format_number(v.imag()) << ',' << format_number(voltage_pu(network, solution, b, p)) << ','
          << optional_number(dist[b]) << '\n';
    }
  }
  out << footer(solution.converged);
  return out.str();
}

std::string currents_csv(const PhasedNetwork& network, const PowerFlowSolution& solution) {
  std::ostringstream out;
  out << "branch,kind,phase,i_real,i_imag,i_amps,ampacity\n";
  for (std::size_t flat = 0; flat < network.branch_count(); ++flat) {
    const BranchRef ref = network.branch_at(flat);
    std::optional<double> ampacity;
    if (ref.kind == BranchKind::segment && network.segments()[ref.index].ampacity != kUnlimitedAmpacity)
      ampacity = network.segments()[ref.index].ampacity;
    const char* kind = ref.kind == BranchKind::segment ? "line" : "transformer";
    for (Phase p : kAllPhases) {
      if (!network.branch_phases(ref).contains(p))
        continue;
      const Complex i = solution.branch_currents[flat][slot(p)];
      out << network.branch_id(ref) << ',' << kind << ',' << phase_letter(p) << ','
          << format_number(i.real()) << ',' << format_number(i.imag()) << ','
          << format_number(std::abs(i)) << ',' << optional_number(ampacity) << '\n';
    }
  }
  out << footer(solution.converged);
  return out.str();
}

std::string losses_csv(const LossBreakdown& loss, const PhasedNetwork& network, bool converged) {
  std::ostringstream out;
  out << "element,kind,kw\n";
  for (std::size_t flat = 0; flat < network.branch_count(); ++flat) {
    const BranchRef ref = network.branch_at(flat);
    const std::string& id = network.branch_id(ref);
    const auto it = loss.per_branch_kw.find(id);
    out << id << ',' << (ref.kind == BranchKind::segment ? "line" : "transformer") << ','
        << format_number(it == loss.per_branch_kw.end() ? 0.0 : it->second) << '\n';
  }
  out << "line_loss_kw,total," << format_number(loss.line_loss_kw) << '\n';
  out << "transformer_loss_kw,total," << format_number(loss.transformer_loss_kw) << '\n';
  out << "total_loss_kw,total," << format_number(loss.total_loss_kw) << '\n';
  out << "load_power_kw,total," << format_number(loss.load_power_kw) << '\n';
  out << "loss_percent,total," << format_number(loss.loss_percent) << '\n';
  out << footer(converged);
  return out.str();
}

std::string plan_csv(const PhasedNetwork& network, const DGPlanResult& result) {
  std::ostringstream out;
  out << "dg,bus,phases,p_min_kw,p_max_kw,capacity_kw\n";
  for (std::size_t i = 0; i < network.dg_units().size(); ++i) {
    const DGUnit& u = network.dg_units()[i];
    out << u.id << ',' << u.bus << ',' << u.phases.to_string() << ',' << format_number(u.p_min_kw)
        << ',' << format_number(u.p_max_kw) << ',' << format_number(result.capacities_kw[i]) << '\n';
  }
  return out.str();
}

std::string convergence_csv(const optim::OptimizationResult& optimization) {
  std::ostringstream out;
  out << "iteration,engine,best_fitness\n";
  out << "0," << optimization.engine << ',' << format_number(optimization.initial_value) << '\n';
  for (std::size_t i = 0; i < optimization.history.size(); ++i)
    out << i + 1 << ',' << optimization.engine << ',' << format_number(optimization.history[i]) << '\n';
  return out.str();
}

std::string summary_text(const PhasedNetwork& network, const DGPlanResult& result, double wall_time_s) {
  std::ostringstream out;
  out << "network=" << network.name() << '\n';
  out << "engine=" << result.optimization.engine << '\n';
  out << "seed=" << result.seed << '\n';
  out << "iterations=" << result.optimization.iterations << '\n';
  out << "evaluations=" << result.optimization.evaluations << '\n';
  out << "best_fitness=" << format_number(result.best_fitness) << '\n';
  out << "base_fitness=" << format_number(result.base_fitness) << '\n';
  out << "base_loss_kw=" << format_number(result.base_loss.total_loss_kw) << '\n';
  out << "optimized_loss_kw=" << format_number(result.optimized_loss.total_loss_kw) << '\n';
  out << "optimized_voltage_violations=" << result.optimized_limits.voltage_violations.size() << '\n';
  out << "optimized_ampacity_violations=" << result.optimized_limits.ampacity_violations.size() << '\n';
  out << "wall_time_s=" << format_number(wall_time_s) << '\n';
  return out.str();
}

} // namespace mphase::cli
