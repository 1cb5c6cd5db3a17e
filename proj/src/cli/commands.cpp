#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "mphase/cli/artifacts.hpp"
#include "mphase/cli/cli.hpp"
#include "mphase/feeder/parser.hpp"
#include "mphase/planner/report.hpp"

namespace mphase::cli {

namespace {

class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  std::string command;
  std::string feeder;
  std::string engine = "cfpso";
  std::string seed;
  std::string out_dir = ".";
  std::vector<std::string> overrides;
};

constexpr const char* kSetKeys =
    "--set keys (defaults in parentheses):\n"
    "  all engines: max_iterations (100), stall_iterations (20, 0 disables),\n"
    "    execution (parallel|serial)\n"
    "  cfpso: swarm_size (30), c1 (2.05), c2 (2.05), coefficients (per_dimension|per_particle),\n"
    "    boundary (absorbing|reflecting)\n"
    "  iwpso: as cfpso with w (0.7), c1 (2), c2 (2)\n"
    "  ga: population_size (30), crossover_rate (0.9), mutation_rate (0.1), tournament_size (3),\n"
    "    blend_alpha (0.5), mutation_scale (0.1)\n"
    "  penalty.voltage (1000), penalty.ampacity (1000), penalty.nonconvergence (1e6)\n"
    "  solver.tolerance_pu (1e-6 for plan, 1e-4 for solve), solver.max_iterations (100)\n"
    "Exit codes: 0 ok, 1 parse error, 2 validation error, 3 not converged, 4 misconfiguration\n";

double to_real(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size())
    throw ConfigError("--set " + key + ": expected a number, got '" + value + "'");
  return v;
}

std::size_t to_count(const std::string& key, const std::string& value) {
  const double v = to_real(key, value);
  if (v < 0.0 || v != static_cast<double>(static_cast<std::size_t>(v)))
    throw ConfigError("--set " + key + ": expected a nonnegative integer, got '" + value + "'");
  return static_cast<std::size_t>(v);
}

optim::Execution to_execution(const std::string& key, const std::string& value) {
  if (value == "serial")
    return optim::Execution::serial;
  if (value == "parallel")
    return optim::Execution::parallel;
  throw ConfigError("--set " + key + ": expected serial or parallel");
}

template <typename Swarm>
bool apply_swarm_key(Swarm& p, const std::string& key, const std::string& value) {
  if (key == "swarm_size")
    p.swarm_size = to_count(key, value);
  else if (key == "max_iterations")
    p.max_iterations = to_count(key, value);
  else if (key == "stall_iterations")
    p.stall_iterations = to_count(key, value);
  else if (key == "c1")
    p.c1 = to_real(key, value);
  else if (key == "c2")
    p.c2 = to_real(key, value);
  else if (key == "execution")
    p.execution = to_execution(key, value);
  else if (key == "coefficients") {
    if (value == "per_dimension")
      p.coefficients = optim::RandomCoefficients::per_dimension;
    else if (value == "per_particle")
      p.coefficients = optim::RandomCoefficients::per_particle;
    else
      throw ConfigError("--set coefficients: expected per_dimension or per_particle");
  } else if (key == "boundary") {
    if (value == "absorbing")
      p.boundary = optim::BoundaryMode::absorbing;
    else if (value == "reflecting")
      p.boundary = optim::BoundaryMode::reflecting;
    else
      throw ConfigError("--set boundary: expected absorbing or reflecting");
  } else
    return false;
  return true;
}

bool apply_ga_key(optim::GaParams& p, const std::string& key, const std::string& value) {
  if (key == "population_size")
    p.population_size = to_count(key, value);
  else if (key == "max_iterations" || key == "max_generations")
    p.max_generations = to_count(key, value);
  else if (key == "stall_iterations" || key == "stall_generations")
    p.stall_generations = to_count(key, value);
  else if (key == "crossover_rate")
    p.crossover_rate = to_real(key, value);
  else if (key == "mutation_rate")
    p.mutation_rate = to_real(key, value);
  else if (key == "tournament_size")
    p.tournament_size = to_count(key, value);
  else if (key == "blend_alpha")
    p.blend_alpha = to_real(key, value);
  else if (key == "mutation_scale")
    p.mutation_scale = to_real(key, value);
  else if (key == "execution")
    p.execution = to_execution(key, value);
  else
    return false;
  return true;
}

bool apply_common_key(PlannerConfig& config, const std::string& key, const std::string& value) {
  if (key == "penalty.voltage")
    config.penalties.voltage = to_real(key, value);
  else if (key == "penalty.ampacity")
    config.penalties.ampacity = to_real(key, value);
  else if (key == "penalty.nonconvergence")
    config.penalties.nonconvergence = to_real(key, value);
  else if (key == "solver.tolerance_pu")
    config.solver.tolerance_pu = to_real(key, value);
  else if (key == "solver.max_iterations") {
    const std::size_t n = to_count(key, value);
    if (n > 1000000)
      throw ConfigError("--set solver.max_iterations: too large");
    config.solver.max_iterations = static_cast<int>(n);
  } else
    return false;
  return true;
}

std::vector<std::pair<std::string, std::string>> split_overrides(const std::vector<std::string>& raw) {
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& item : raw) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("--set expects key=value, got '" + item + "'");
    pairs.emplace_back(item.substr(0, eq), item.substr(eq + 1));
  }
  return pairs;
}

PlannerConfig planner_config(const RunConfig& run, std::uint64_t seed) {
  PlannerConfig config;
  if (run.engine == "cfpso")
    config.engine = optim::CfPsoParams{};
  else if (run.engine == "iwpso")
    config.engine = optim::IwPsoParams{};
  else
    config.engine = optim::GaParams{};

  for (const auto& [key, value] : split_overrides(run.overrides)) {
    if (apply_common_key(config, key, value))
      continue;
    bool applied = false;
    if (auto* cf = std::get_if<optim::CfPsoParams>(&config.engine))
      applied = apply_swarm_key(*cf, key, value);
    else if (auto* iw = std::get_if<optim::IwPsoParams>(&config.engine))
      applied = key == "w" ? (iw->w = to_real(key, value), true) : apply_swarm_key(*iw, key, value);
    else
      applied = apply_ga_key(std::get<optim::GaParams>(config.engine), key, value);
    if (!applied)
      throw ConfigError("unknown --set key for engine " + run.engine + ": " + key);
  }
  std::visit([seed](auto& p) { p.seed = seed; }, config.engine);

  try {
    config.penalties.validate();
    config.solver.validate();
    std::visit([](const auto& p) { p.validate(); }, config.engine);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return config;
}

SolverSettings solve_settings(const RunConfig& run) {
  PlannerConfig config;
  config.solver = SolverSettings{};
  for (const auto& [key, value] : split_overrides(run.overrides))
    if (key.rfind("solver.", 0) != 0 || !apply_common_key(config, key, value))
      throw ConfigError("solve only accepts solver.* keys, got: " + key);
  try {
    config.solver.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return config.solver;
}

std::uint64_t resolve_seed(const RunConfig& run, std::ostream& out) {
  if (run.seed.empty())
    throw ConfigError("plan requires --seed N or --seed auto");
  if (run.seed == "auto") {
    std::random_device device;
    const std::uint64_t seed = (static_cast<std::uint64_t>(device()) << 32) | device();
    out << "seed=" << seed << '\n';
    return seed;
  }
  std::uint64_t seed = 0;
  const char* first = run.seed.data();
  const char* last = first + run.seed.size();
  auto [ptr, ec] = std::from_chars(first, last, seed);
  if (ec != std::errc() || ptr != last)
    throw ConfigError("--seed expects a nonnegative integer or auto");
  return seed;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  file << text;
  if (!file)
    throw std::runtime_error("cannot write " + path.string());
}

std::filesystem::path output_dir(const RunConfig& run) {
  std::filesystem::path dir(run.out_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void print_violations(const ValidationReport& report, std::ostream& out) {
  for (const auto& v : report)
    out << v.element_id << '\t' << v.reason << '\n';
}

int cmd_validate(const PhasedNetwork& network, std::ostream& out) {
  out << "OK " << network.buses().size() << ' ' << network.branch_count() << '\n';
  return kOk;
}

int cmd_solve(const RunConfig& run, const PhasedNetwork& network, std::ostream& out) {
  const SolverSettings settings = solve_settings(run);
  const PowerFlowSolution solution = SweepSolver(network).solve(settings);
  LossBreakdown loss;
  {
    PowerFlowSolution last = solution;
    last.converged = true; // losses of the last iterate when the sweep diverged
    loss = total_loss(network, last);
  }
  const auto dir = output_dir(run);
  write_file(dir / "voltages.csv", voltages_csv(network, solution));
  write_file(dir / "currents.csv", currents_csv(network, solution));
  write_file(dir / "losses.csv", losses_csv(loss, network, solution.converged));
  out << (solution.converged ? "converged" : "not converged") << " after " << solution.iterations
      << " iterations, total loss " << format_number(loss.total_loss_kw) << " kW\n";
  return solution.converged ? kOk : kNotConverged;
}

int cmd_plan(const RunConfig& run, const PhasedNetwork& network, std::ostream& out) {
  const std::uint64_t seed = resolve_seed(run, out);
  const PlannerConfig config = planner_config(run, seed);
  const auto start = std::chrono::steady_clock::now();
  const DGPlanResult result = plan(network, config);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const auto dir = output_dir(run);
  write_file(dir / "plan.csv", plan_csv(network, result));
  write_file(dir / "convergence.csv", convergence_csv(result.optimization));
  write_file(dir / "report.csv", report_csv(compare_report(result)));
  write_file(dir / "voltages_base.csv", voltages_csv(network, result.base_solution));
  write_file(dir / "voltages_optimized.csv", voltages_csv(network, result.optimized_solution));
  write_file(dir / "summary.txt", summary_text(network, result, wall));
  for (std::size_t i = 0; i < result.dg_ids.size(); ++i)
    out << result.dg_ids[i] << ' ' << format_number(result.capacities_kw[i]) << " kW\n";
  out << "loss " << format_number(result.base_loss.total_loss_kw) << " kW -> "
      << format_number(result.optimized_loss.total_loss_kw) << " kW\n";
  return kOk;
}

int dispatch(const RunConfig& run, std::ostream& out, std::ostream& err) {
  PhasedNetwork network;
  try {
    network = load_feeder(run.feeder);
  } catch (const ParseError& e) {
    err << run.feeder << ':' << e.pos().line << ':' << e.pos().column << ' ' << e.detail()
        << (e.token().empty() ? std::string() : " near '" + e.token() + "'") << '\n';
    return kParseError;
  } catch (const BuildError& e) {
    if (e.kind() == BuildError::Kind::validation_failed) {
      print_violations(e.report(), out);
      return kValidationError;
    }
    err << run.feeder << ':' << e.pos().line << ':' << e.pos().column << ' ' << e.what() << '\n';
    return kParseError;
  }

  try {
    if (run.command == "validate")
      return cmd_validate(network, out);
    if (run.command == "solve")
      return cmd_solve(run, network, out);
    return cmd_plan(run, network, out);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kMisconfigured;
  } catch (const NoDGUnits& e) {
    err << "study error: " << e.what() << '\n';
    return kMisconfigured;
  } catch (const SingularElement& e) {
    err << "validation error: " << e.what() << '\n';
    return kValidationError;
  } catch (const NotConverged& e) {
    err << "not converged: " << e.what() << '\n';
    return kNotConverged;
  }
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig run;
  CLI::App app{"Multi-phase distribution load flow and DG capacity planning"};
  app.footer(kSetKeys);
  app.add_option("command", run.command, "validate, solve or plan")
      ->required()
      ->check(CLI::IsMember({"validate", "solve", "plan"}));
  app.add_option("feeder", run.feeder, "feeder description file")->required();
  app.add_option("--engine", run.engine, "optimizer for plan")
      ->check(CLI::IsMember({"cfpso", "iwpso", "ga"}))
      ->capture_default_str();
  app.add_option("--seed", run.seed, "RNG seed for plan: a nonnegative integer or auto (required for plan)");
  app.add_option("--out", run.out_dir, "output directory for CSV artifacts")->capture_default_str();
  app.add_option("--set", run.overrides, "parameter override key=value (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kMisconfigured;
  }

  try {
    return dispatch(run, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kMisconfigured;
  }
}

} // namespace mphase::cli
