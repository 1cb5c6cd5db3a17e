#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mphase/powerflow/solver.hpp"

namespace mphase {

void SolverSettings::validate() const {
  if (!(tolerance_pu > 0.0) || !std::isfinite(tolerance_pu))
    throw std::invalid_argument("solver tolerance must be positive");
  if (max_iterations < 1)
    throw std::invalid_argument("solver max_iterations must be at least 1");
}

namespace {

Complex phase_rotation(Phase p) {
  constexpr double deg = std::numbers::pi / 180.0;
  switch (p) {
  case Phase::A:
    return {1.0, 0.0};
  case Phase::B:
    return std::polar(1.0, -120.0 * deg);
  case Phase::C:
    return std::polar(1.0, 120.0 * deg);
  }
  return {1.0, 0.0};
}

bool is_singular(const ImpedanceMatrix& z) {
  double scale = 0.0;
  for (std::size_t r = 0; r < z.dim(); ++r)
    for (std::size_t c = 0; c < z.dim(); ++c)
      scale = std::max(scale, std::abs(z(r, c)));
  const double det = std::abs(z.determinant());
  if (!(scale > 0.0) || !std::isfinite(det))
    return true;
  return det <= 1e-13 * std::pow(scale, static_cast<double>(z.dim()));
}

// Current drawn by a ZIP-style element: conj(S/V) scaled by (|V|/Vn)^exponent.
Complex drawn_current(Complex power, Complex v, int exponent, double v_nominal) {
  const Complex base = std::conj(power / v);
  switch (exponent) {
  case 1:
    return base * (std::abs(v) / v_nominal);
  case 2:
    return std::conj(power) * v / (v_nominal * v_nominal);
  default:
    return base;
  }
}

} // namespace

SweepSolver::SweepSolver(const PhasedNetwork& network) : network_(&network) {
  const auto order = radial_order(network);
  const auto source = network.source_bus();
  source_ = *source; // radial_order guarantees a single source
  const Bus& src = network.buses()[source_];
  for (Phase p : kAllPhases)
    if (src.phases.contains(p))
      source_voltage_[slot(p)] = src.nominal_voltage * phase_rotation(p);

  const std::size_t nb = network.branch_count();
  ratios_.assign(nb, PhaseVector{Complex(1.0), Complex(1.0), Complex(1.0)});
  impedances_.resize(nb);
  for (std::size_t flat = 0; flat < nb; ++flat) {
    const BranchRef ref = network.branch_at(flat);
    if (ref.kind == BranchKind::segment) {
      impedances_[flat] = network.segments()[ref.index].z;
    } else {
      const Transformer& tx = network.transformers()[ref.index];
      const double v_from = network.buses()[*network.find_bus(tx.from_bus)].nominal_voltage;
      const double v_to = network.buses()[*network.find_bus(tx.to_bus)].nominal_voltage;
      const double phase_va = tx.rating_kva * 1000.0 / static_cast<double>(tx.phases.size());
      const double z_base = v_to * v_to / phase_va;
      impedances_[flat] = ImpedanceMatrix::diagonal(tx.phases.size(), tx.series_impedance_pu * z_base);
      const double ratio = tx.tap * v_to / v_from;
      ratios_[flat] = PhaseVector{Complex(ratio), Complex(ratio), Complex(ratio)};
    }
    if (is_singular(impedances_[flat]))
      throw SingularElement("branch " + network.branch_id(ref) + " has a singular impedance matrix");
  }
  for (const Regulator& reg : network.regulators()) {
    const std::size_t flat = network.flat_index(*network.find_branch(reg.on_segment));
    for (std::size_t i = 0; i < reg.phases.size(); ++i)
      ratios_[flat][slot(reg.phases.at(i))] = reg.per_phase_tap[i];
  }

  for (BranchRef ref : order) {
    order_.push_back(Branch{network.flat_index(ref), *network.find_bus(network.branch_from(ref)),
                            *network.find_bus(network.branch_to(ref)), network.branch_phases(ref)});
  }

  auto bus_of = [&](const std::string& id) { return *network.find_bus(id); };
  for (const Load& load : network.loads()) {
    const std::size_t bus = bus_of(load.bus);
    const double vn = network.buses()[bus].nominal_voltage;
    const int exponent = load.model == LoadModel::constant_pq  ? 0
                         : load.model == LoadModel::constant_i ? 1
                                                               : 2;
    auto power = [&](std::size_t i) {
      return Complex(load.per_phase_kw[i], load.per_phase_kvar[i]) * 1000.0;
    };
    if (load.connection == LoadConnection::wye) {
      for (std::size_t i = 0; i < load.phases.size(); ++i) {
        const Phase p = load.phases.at(i);
        injections_.push_back(Injection{bus, p, p, power(i), exponent, vn, false});
      }
    } else if (load.phases.size() == 3) {
      const double vll = std::sqrt(3.0) * vn;
      injections_.push_back(Injection{bus, Phase::A, Phase::B, power(0), exponent, vll, true});
      injections_.push_back(Injection{bus, Phase::B, Phase::C, power(1), exponent, vll, true});
      injections_.push_back(Injection{bus, Phase::C, Phase::A, power(2), exponent, vll, true});
    } else {
      const double vll = std::sqrt(3.0) * vn;
      injections_.push_back(Injection{bus, load.phases.at(0), load.phases.at(1),
                                      power(0) + power(1), exponent, vll, true});
    }
  }
  for (const CapacitorBank& cap : network.capacitors()) {
    if (!cap.enabled)
      continue;
    const std::size_t bus = bus_of(cap.bus);
    const double vn = network.buses()[bus].nominal_voltage;
    for (std::size_t i = 0; i < cap.phases.size(); ++i) {
      const Phase p = cap.phases.at(i);
      injections_.push_back(Injection{bus, p, p, Complex(0.0, -cap.per_phase_kvar[i] * 1000.0), 2, vn, false});
    }
  }
  for (const DGUnit& dg : network.dg_units())
    generators_.push_back(Generator{bus_of(dg.bus), dg.phases});
}

void SweepSolver::compute_injections(const std::vector<PhaseVector>& v,
                                     std::span<const double> dg_kw,
                                     std::vector<PhaseVector>& current,
                                     std::vector<Complex>* load_power,
                                     std::vector<double>* dg_power) const {
  std::fill(current.begin(), current.end(), PhaseVector{});
  for (const Injection& inj : injections_) {
    const PhaseVector& bus_v = v[inj.bus];
    if (!inj.line_to_line) {
      const Complex vp = bus_v[slot(inj.p)];
      const Complex i = drawn_current(inj.power, vp, inj.exponent, inj.v_nominal);
      current[inj.bus][slot(inj.p)] += i;
      if (load_power)
        (*load_power)[inj.bus] += vp * std::conj(i);
    } else {
      const Complex vpq = bus_v[slot(inj.p)] - bus_v[slot(inj.q)];
      const Complex i = drawn_current(inj.power, vpq, inj.exponent, inj.v_nominal);
      current[inj.bus][slot(inj.p)] += i;
      current[inj.bus][slot(inj.q)] -= i;
      if (load_power)
        (*load_power)[inj.bus] += vpq * std::conj(i);
    }
  }
  for (std::size_t g = 0; g < generators_.size(); ++g) {
    const Generator& gen = generators_[g];
    const double per_phase_w = dg_kw[g] * 1000.0 / static_cast<double>(gen.phases.size());
    for (std::size_t i = 0; i < gen.phases.size(); ++i) {
      const std::size_t s = slot(gen.phases.at(i));
      current[gen.bus][s] -= std::conj(Complex(per_phase_w) / v[gen.bus][s]);
    }
    if (dg_power)
      (*dg_power)[gen.bus] += dg_kw[g] * 1000.0;
  }
}

void SweepSolver::backward(const std::vector<PhaseVector>& injection,
                           std::vector<PhaseVector>& series,
                           std::vector<PhaseVector>& sending) const {
  std::vector<PhaseVector> acc = injection;
  for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
    PhaseVector& s = series[it->flat];
    PhaseVector& f = sending[it->flat];
    s = PhaseVector{};
    f = PhaseVector{};
    for (std::size_t i = 0; i < it->phases.size(); ++i) {
      const std::size_t p = slot(it->phases.at(i));
      s[p] = acc[it->to][p];
      f[p] = ratios_[it->flat][p] * s[p];
      acc[it->from][p] += f[p];
    }
  }
}

void SweepSolver::forward(const std::vector<PhaseVector>& series, std::vector<PhaseVector>& v) const {
  for (const Branch& b : order_) {
    const ImpedanceMatrix& z = impedances_[b.flat];
    const PhaseVector& i_series = series[b.flat];
    PhaseVector next{};
    for (std::size_t r = 0; r < b.phases.size(); ++r) {
      const std::size_t p = slot(b.phases.at(r));
      Complex drop{0.0, 0.0};
      for (std::size_t c = 0; c < b.phases.size(); ++c)
        drop += z(r, c) * i_series[slot(b.phases.at(c))];
      next[p] = ratios_[b.flat][p] * v[b.from][p] - drop;
    }
    v[b.to] = next;
  }
}

PowerFlowSolution SweepSolver::solve(const SolverSettings& settings,
                                     std::span<const double> dg_capacity_kw,
                                     std::span<const PhaseVector> initial_voltages) const {
  settings.validate();
  const PhasedNetwork& net = *network_;
  const std::size_t nbus = net.buses().size();
  const std::size_t nbranch = net.branch_count();

  std::vector<double> dg_kw;
  if (dg_capacity_kw.empty()) {
    for (const DGUnit& dg : net.dg_units())
      dg_kw.push_back(dg.capacity_kw);
  } else {
    if (dg_capacity_kw.size() != generators_.size())
      throw std::invalid_argument("DG capacity override has the wrong length");
    dg_kw.assign(dg_capacity_kw.begin(), dg_capacity_kw.end());
  }

  PowerFlowSolution sol;
  sol.branch_currents.assign(nbranch, PhaseVector{});
  sol.branch_from_currents.assign(nbranch, PhaseVector{});
  std::vector<PhaseVector>& v = sol.bus_voltages;
  v.assign(nbus, PhaseVector{});
  v[source_] = source_voltage_;
  if (!settings.flat_start && initial_voltages.size() == nbus) {
    v.assign(initial_voltages.begin(), initial_voltages.end());
    v[source_] = source_voltage_;
  } else {
    forward(sol.branch_currents, v); // zero current: nominal profile through ratios
  }

  std::vector<double> inv_nominal(nbus);
  for (std::size_t b = 0; b < nbus; ++b)
    inv_nominal[b] = 1.0 / net.buses()[b].nominal_voltage;

  std::vector<PhaseVector> injection(nbus);
  std::vector<PhaseVector> next;
  for (int iter = 1; iter <= settings.max_iterations; ++iter) {
    compute_injections(v, dg_kw, injection, nullptr, nullptr);
    backward(injection, sol.branch_currents, sol.branch_from_currents);
    next = v;
    forward(sol.branch_currents, next);

    double mismatch = 0.0;
    bool finite = true;
    for (std::size_t b = 0; b < nbus; ++b)
      for (std::size_t p = 0; p < 3; ++p) {
        const double d = std::abs(next[b][p] - v[b][p]) * inv_nominal[b];
        finite = finite && std::isfinite(d);
        mismatch = std::max(mismatch, d);
      }
    if (!finite)
      mismatch = std::numeric_limits<double>::infinity();
    v.swap(next);
    sol.iterations = iter;
    sol.max_mismatch_pu = mismatch;
    if (!std::isfinite(mismatch))
      break;
    if (mismatch <= settings.tolerance_pu) {
      sol.converged = true;
      break;
    }
  }

  // Currents and powers consistent with the final voltages.
  sol.bus_load_power.assign(nbus, Complex{});
  sol.bus_dg_power.assign(nbus, 0.0);
  compute_injections(v, dg_kw, injection, &sol.bus_load_power, &sol.bus_dg_power);
  backward(injection, sol.branch_currents, sol.branch_from_currents);

  Complex source_current_power{0.0, 0.0};
  PhaseVector source_current = injection[source_];
  for (const Branch& b : order_)
    if (b.from == source_)
      for (std::size_t p = 0; p < 3; ++p)
        source_current[p] += sol.branch_from_currents[b.flat][p];
  for (std::size_t p = 0; p < 3; ++p)
    source_current_power += v[source_][p] * std::conj(source_current[p]);
  sol.source_power = source_current_power;
  return sol;
}

PowerFlowSolution solve(const PhasedNetwork& network, const SolverSettings& settings) {
  return SweepSolver(network).solve(settings);
}

} // namespace mphase
