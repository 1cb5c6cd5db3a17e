#include "random_network.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace mphase::testing {

namespace {

class Draw {
public:
  explicit Draw(std::mt19937_64& rng) : rng_(rng) {}

  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  bool chance(double p) { return real(0.0, 1.0) < p; }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

  // Mostly full-precision values, sometimes short or extreme ones.
  double number(double lo, double hi) {
    const double x = real(lo, hi);
    double r = x;
    switch (index(6)) {
    case 0:
      r = std::round(x);
      break;
    case 1:
      r = std::round(x * 1000.0) / 1000.0;
      break;
    }
    return r > lo && r < hi ? r : x;
  }

  PhaseSet subset_of(PhaseSet parent) {
    for (;;) {
      unsigned mask = 0;
      for (std::size_t i = 0; i < parent.size(); ++i)
        if (chance(0.7))
          mask |= 1u << slot(parent.at(i));
      if (mask != 0)
        return PhaseSet::from_mask(static_cast<std::uint8_t>(mask));
    }
  }

  std::string id(const char* prefix, std::size_t n) {
    static const char kChars[] = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_.-";
    std::string s = prefix;
    const std::size_t extra = index(4);
    for (std::size_t i = 0; i < extra; ++i)
      s += kChars[index(sizeof(kChars) - 1)];
    return s + std::to_string(n);
  }

private:
  std::mt19937_64& rng_;
};

// Off-diagonal magnitudes below 0.3 of the smallest diagonal keep the matrix
// strictly diagonally dominant, hence invertible.
ImpedanceMatrix random_z(Draw& d, std::size_t dim) {
  ImpedanceMatrix z(dim);
  double smallest = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < dim; ++r) {
    z(r, r) = Complex(d.number(0.01, 2.0), d.number(0.02, 3.0));
    smallest = std::min(smallest, std::abs(z(r, r)));
  }
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = r + 1; c < dim; ++c)
      z(r, c) = z(c, r) = std::polar(d.real(0.0, 0.3 * smallest), d.real(0.0, 1.5));
  return z;
}

std::vector<double> values(Draw& d, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (double& x : v)
    x = d.number(lo, hi);
  return v;
}

} // namespace

PhasedNetwork random_network(std::mt19937_64& rng, std::size_t max_buses) {
  Draw d(rng);
  NetworkElements e;
  e.name = d.id("net", 0);
  e.limits.min_pu = d.number(0.8, 0.99);
  e.limits.max_pu = d.number(1.01, 1.2);
  const std::size_t nb = 2 + d.index(max_buses - 1);
  std::size_t serial = 0;

  e.buses.push_back(Bus{d.id("src", serial++), d.chance(0.8) ? PhaseSet{} : d.subset_of(PhaseSet{}),
                        d.number(0.1, 40.0) * 1000.0, true});
  for (std::size_t i = 1; i < nb; ++i) {
    const Bus parent = e.buses[d.index(e.buses.size())];
    Bus bus{d.id("b", serial++), d.subset_of(parent.phases), parent.nominal_voltage, false};
    if (d.chance(0.2)) {
      bus.nominal_voltage = d.number(0.1, 40.0) * 1000.0;
      Transformer tx{d.id("t", serial++), parent.id, bus.id, bus.phases, d.number(5.0, 5000.0),
                     Complex(d.number(0.0, 0.05), d.number(0.01, 0.1)), d.chance(0.5) ? 1.0 : d.number(0.9, 1.1)};
      e.transformers.push_back(std::move(tx));
    } else {
      LineSegment seg{d.id("l", serial++), parent.id, bus.id, bus.phases, random_z(d, bus.phases.size())};
      if (d.chance(0.5))
        seg.ampacity = d.number(10.0, 1000.0);
      if (d.chance(0.5))
        seg.length_m = d.number(0.0, 5000.0);
      if (d.chance(0.3)) {
        Regulator reg{d.id("vr", serial++), seg.id, d.subset_of(seg.phases), {}};
        reg.per_phase_tap = values(d, reg.phases.size(), kRegulatorTapMin, kRegulatorTapMax);
        e.regulators.push_back(std::move(reg));
      }
      e.segments.push_back(std::move(seg));
    }
    e.buses.push_back(std::move(bus));
  }

  for (const Bus& bus : e.buses) {
    const std::size_t loads = d.index(3);
    for (std::size_t k = 0; k < loads; ++k) {
      Load load;
      load.id = d.id("ld", serial++);
      load.bus = bus.id;
      load.phases = d.subset_of(bus.phases);
      if (load.phases.size() >= 2 && d.chance(0.4))
        load.connection = LoadConnection::delta;
      load.model = static_cast<LoadModel>(d.index(3));
      load.per_phase_kw = values(d, load.phases.size(), 0.0, 500.0);
      load.per_phase_kvar = values(d, load.phases.size(), -100.0, 300.0);
      e.loads.push_back(std::move(load));
    }
    if (d.chance(0.2)) {
      const PhaseSet phases = d.subset_of(bus.phases);
      e.capacitors.push_back(CapacitorBank{d.id("c", serial++), bus.id, phases,
                                           values(d, phases.size(), 0.0, 600.0), d.chance(0.8)});
    }
    if (d.chance(0.2)) {
      DGUnit dg{d.id("g", serial++), bus.id, d.subset_of(bus.phases)};
      dg.p_min_kw = d.chance(0.5) ? 0.0 : d.number(0.0, 100.0);
      dg.p_max_kw = dg.p_min_kw + d.number(0.0, 3000.0);
      dg.capacity_kw = d.chance(0.5) ? dg.p_min_kw : d.real(dg.p_min_kw, dg.p_max_kw);
      e.dg_units.push_back(std::move(dg));
    }
  }
  return PhasedNetwork(std::move(e));
}

} // namespace mphase::testing
