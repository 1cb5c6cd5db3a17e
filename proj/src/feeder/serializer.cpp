#include <charconv>
#include <cmath>
#include <sstream>

#include "mphase/feeder/parser.hpp"

namespace mphase {

std::string format_number(double value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  if (ec != std::errc())
    return "nan";
  return std::string(buffer, ptr);
}

namespace {

// Writes value / scale such that parsing the text and multiplying by `scale`
// reproduces `value` exactly whenever such a decimal exists.
std::string format_scaled(double value, double scale) {
  double candidate = value / scale;
  if (candidate * scale == value)
    return format_number(candidate);
  for (int step = 1; step <= 4; ++step) {
    for (double dir : {1.0, -1.0}) {
      double probe = candidate;
      for (int k = 0; k < step; ++k)
        probe = std::nextafter(probe, dir * INFINITY);
      if (probe * scale == value)
        return format_number(probe);
    }
  }
  return format_number(candidate);
}

std::string format_complex(Complex z) {
  std::string out = format_number(z.real());
  if (!std::signbit(z.imag()))
    out += '+';
  out += format_number(z.imag());
  out += 'j';
  return out;
}

std::string format_list(const std::vector<double>& values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i)
      out += ' ';
    out += format_number(values[i]);
  }
  return out + "]";
}

std::string format_matrix(const ImpedanceMatrix& z) {
  std::string out = "[";
  for (std::size_t r = 0; r < z.dim(); ++r) {
    if (r)
      out += " | ";
    for (std::size_t c = 0; c < z.dim(); ++c) {
      if (c)
        out += ' ';
      out += format_complex(z(r, c));
    }
  }
  return out + "]";
}

const char* connection_name(LoadConnection c) { return c == LoadConnection::wye ? "wye" : "delta"; }

const char* model_name(LoadModel m) {
  switch (m) {
  case LoadModel::constant_pq:
    return "pq";
  case LoadModel::constant_z:
    return "z";
  case LoadModel::constant_i:
    return "i";
  }
  return "pq";
}

} // namespace

std::string serialize(const PhasedNetwork& network) {
  std::ostringstream out;
  out << "network " << network.name() << " vmin_pu=" << format_number(network.limits().min_pu)
      << " vmax_pu=" << format_number(network.limits().max_pu) << '\n';

  for (const auto& b : network.buses()) {
    out << "bus " << b.id << " phases=" << b.phases.to_string()
        << " kv_ln=" << format_scaled(b.nominal_voltage, 1000.0);
    if (b.is_source)
      out << " source=true";
    out << '\n';
  }
  for (const auto& s : network.segments()) {
    out << "line " << s.id << " from=" << s.from_bus << " to=" << s.to_bus
        << " phases=" << s.phases.to_string() << " z=" << format_matrix(s.z);
    if (std::isfinite(s.ampacity))
      out << " amps=" << format_number(s.ampacity);
    if (s.length_m)
      out << " length_m=" << format_number(*s.length_m);
    out << '\n';
  }
  for (const auto& t : network.transformers()) {
    out << "transformer " << t.id << " from=" << t.from_bus << " to=" << t.to_bus
        << " phases=" << t.phases.to_string() << " kva=" << format_number(t.rating_kva)
        << " r_pu=" << format_number(t.series_impedance_pu.real())
        << " x_pu=" << format_number(t.series_impedance_pu.imag())
        << " tap=" << format_number(t.tap) << '\n';
  }
  for (const auto& r : network.regulators()) {
    out << "regulator " << r.id << " segment=" << r.on_segment << " phases=" << r.phases.to_string()
        << " tap=" << format_list(r.per_phase_tap) << '\n';
  }
  for (const auto& c : network.capacitors()) {
    out << "capacitor " << c.id << " bus=" << c.bus << " phases=" << c.phases.to_string()
        << " kvar=" << format_list(c.per_phase_kvar) << " enabled=" << (c.enabled ? "true" : "false")
        << '\n';
  }
  for (const auto& l : network.loads()) {
    out << "load " << l.id << " bus=" << l.bus << " phases=" << l.phases.to_string()
        << " conn=" << connection_name(l.connection) << " model=" << model_name(l.model)
        << " kw=" << format_list(l.per_phase_kw) << " kvar=" << format_list(l.per_phase_kvar)
        << '\n';
  }
  for (const auto& d : network.dg_units()) {
    out << "dg " << d.id << " bus=" << d.bus << " phases=" << d.phases.to_string()
        << " pmin_kw=" << format_number(d.p_min_kw) << " pmax_kw=" << format_number(d.p_max_kw)
        << " capacity_kw=" << format_number(d.capacity_kw) << '\n';
  }
  return out.str();
}

} // namespace mphase
