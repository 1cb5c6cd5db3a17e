#include <algorithm>
#include <map>
#include <unordered_map>

#include "mphase/feeder/parser.hpp"
#include "schema.hpp"

namespace mphase {

namespace detail {

namespace {

struct KeySpec {
  std::string_view key;
  ValueType type;
};

const std::map<ElementKind, std::vector<KeySpec>>& schema() {
  static const std::map<ElementKind, std::vector<KeySpec>> table{
      {ElementKind::bus,
       {{"phases", ValueType::phases}, {"kv_ln", ValueType::real}, {"source", ValueType::boolean}}},
      {ElementKind::line,
       {{"from", ValueType::text},
        {"to", ValueType::text},
        {"phases", ValueType::phases},
        {"z", ValueType::matrix},
        {"amps", ValueType::real},
        {"length_m", ValueType::real}}},
      {ElementKind::transformer,
       {{"from", ValueType::text},
        {"to", ValueType::text},
        {"phases", ValueType::phases},
        {"kva", ValueType::real},
        {"r_pu", ValueType::real},
        {"x_pu", ValueType::real},
        {"tap", ValueType::real}}},
      {ElementKind::load,
       {{"bus", ValueType::text},
        {"phases", ValueType::phases},
        {"conn", ValueType::text},
        {"model", ValueType::text},
        {"kw", ValueType::list},
        {"kvar", ValueType::list}}},
      {ElementKind::capacitor,
       {{"bus", ValueType::text},
        {"phases", ValueType::phases},
        {"kvar", ValueType::list},
        {"enabled", ValueType::boolean}}},
      {ElementKind::regulator,
       {{"segment", ValueType::text}, {"phases", ValueType::phases}, {"tap", ValueType::list}}},
      {ElementKind::dg,
       {{"bus", ValueType::text},
        {"phases", ValueType::phases},
        {"pmin_kw", ValueType::real},
        {"pmax_kw", ValueType::real},
        {"capacity_kw", ValueType::real}}},
      {ElementKind::network, {{"vmin_pu", ValueType::real}, {"vmax_pu", ValueType::real}}},
  };
  return table;
}

} // namespace

std::optional<ElementKind> kind_from_name(std::string_view name) {
  for (const auto& [kind, keys] : schema())
    if (kind_name(kind) == name)
      return kind;
  return std::nullopt;
}

std::optional<ValueType> key_type(ElementKind kind, std::string_view key) {
  for (const auto& spec : schema().at(kind))
    if (spec.key == key)
      return spec.type;
  return std::nullopt;
}

} // namespace detail

namespace {

class DeclarationReader {
public:
  explicit DeclarationReader(const Declaration& decl) : decl_(decl) {}

  const Property& required(std::string_view key) const {
    const Property* p = decl_.find(key);
    if (!p)
      throw BuildError(BuildError::Kind::missing_key,
                       std::string(kind_name(decl_.kind)) + " " + decl_.id + ": " + std::string(key), {},
                       decl_.pos);
    return *p;
  }

  double real(std::string_view key) const { return std::get<double>(required(key).value); }
  double real(std::string_view key, double fallback) const {
    const Property* p = decl_.find(key);
    return p ? std::get<double>(p->value) : fallback;
  }
  std::optional<double> optional_real(std::string_view key) const {
    const Property* p = decl_.find(key);
    return p ? std::optional<double>(std::get<double>(p->value)) : std::nullopt;
  }
  const std::string& text(std::string_view key) const {
    return std::get<std::string>(required(key).value);
  }
  std::optional<std::string> optional_text(std::string_view key) const {
    const Property* p = decl_.find(key);
    return p ? std::optional<std::string>(std::get<std::string>(p->value)) : std::nullopt;
  }
  bool boolean(std::string_view key, bool fallback) const {
    const Property* p = decl_.find(key);
    return p ? std::get<bool>(p->value) : fallback;
  }
  PhaseSet phases() const { return std::get<PhaseSet>(required("phases").value); }
  std::optional<PhaseSet> optional_phases() const {
    const Property* p = decl_.find("phases");
    return p ? std::optional<PhaseSet>(std::get<PhaseSet>(p->value)) : std::nullopt;
  }

  // A single value is applied to every phase.
  std::vector<double> list(std::string_view key, std::size_t phase_count) const {
    return expand(std::get<ComplexRows>(required(key).value), phase_count);
  }
  std::vector<double> list(std::string_view key, std::size_t phase_count, double fallback) const {
    const Property* p = decl_.find(key);
    if (!p)
      return std::vector<double>(phase_count, fallback);
    return expand(std::get<ComplexRows>(p->value), phase_count);
  }

  ImpedanceMatrix matrix(std::string_view key) const {
    const auto& rows = std::get<ComplexRows>(required(key).value);
    ImpedanceMatrix z(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t c = 0; c < rows[r].size(); ++c)
        z(r, c) = rows[r][c];
    return z;
  }

private:
  static std::vector<double> expand(const ComplexRows& rows, std::size_t phase_count) {
    std::vector<double> out;
    for (const auto& z : rows.front())
      out.push_back(z.real());
    if (out.size() == 1 && phase_count > 1)
      out.assign(phase_count, out.front());
    return out;
  }

  const Declaration& decl_;
};

LoadConnection parse_connection(const std::string& value, const Declaration& decl) {
  if (value == "wye")
    return LoadConnection::wye;
  if (value == "delta")
    return LoadConnection::delta;
  const Property* p = decl.find("conn");
  throw ParseError(ParseError::Kind::syntax, p->pos, value, "expected wye or delta");
}

LoadModel parse_model(const std::string& value, const Declaration& decl) {
  if (value == "pq")
    return LoadModel::constant_pq;
  if (value == "z")
    return LoadModel::constant_z;
  if (value == "i")
    return LoadModel::constant_i;
  const Property* p = decl.find("model");
  throw ParseError(ParseError::Kind::syntax, p->pos, value, "expected pq, z or i");
}

} // namespace

PhasedNetwork build(const FeederDocument& doc) {
  NetworkElements e;
  e.name = "feeder";

  // Shunt elements without a phases key take the phases of their bus.
  std::unordered_map<std::string, PhaseSet> bus_phases;
  for (const auto& decl : doc.declarations)
    if (decl.kind == ElementKind::bus)
      bus_phases[decl.id] = DeclarationReader(decl).optional_phases().value_or(PhaseSet{});
  auto shunt_phases = [&](const DeclarationReader& r) {
    if (auto own = r.optional_phases())
      return *own;
    const auto it = bus_phases.find(r.text("bus"));
    return it == bus_phases.end() ? PhaseSet{} : it->second;
  };

  for (const auto& decl : doc.declarations) {
    DeclarationReader r(decl);
    switch (decl.kind) {
    case ElementKind::network:
      e.name = decl.id;
      e.limits.min_pu = r.real("vmin_pu", VoltageLimits{}.min_pu);
      e.limits.max_pu = r.real("vmax_pu", VoltageLimits{}.max_pu);
      break;
    case ElementKind::bus:
      e.buses.push_back(Bus{decl.id, r.optional_phases().value_or(PhaseSet{}),
                            r.real("kv_ln") * 1000.0, r.boolean("source", false)});
      break;
    case ElementKind::line: {
      LineSegment seg{decl.id, r.text("from"), r.text("to"), r.phases(), r.matrix("z"),
                      r.real("amps", kUnlimitedAmpacity), r.optional_real("length_m")};
      e.segments.push_back(std::move(seg));
      break;
    }
    case ElementKind::transformer:
      e.transformers.push_back(Transformer{decl.id, r.text("from"), r.text("to"), r.phases(),
                                           r.real("kva"), Complex(r.real("r_pu", 0.0), r.real("x_pu")),
                                           r.real("tap", 1.0)});
      break;
    case ElementKind::load: {
      const PhaseSet phases = shunt_phases(r);
      Load load;
      load.id = decl.id;
      load.bus = r.text("bus");
      load.phases = phases;
      load.connection = parse_connection(r.optional_text("conn").value_or("wye"), decl);
      load.model = parse_model(r.optional_text("model").value_or("pq"), decl);
      load.per_phase_kw = r.list("kw", phases.size());
      load.per_phase_kvar = r.list("kvar", phases.size(), 0.0);
      e.loads.push_back(std::move(load));
      break;
    }
    case ElementKind::capacitor: {
      const PhaseSet phases = shunt_phases(r);
      e.capacitors.push_back(CapacitorBank{decl.id, r.text("bus"), phases,
                                           r.list("kvar", phases.size()),
                                           r.boolean("enabled", true)});
      break;
    }
    case ElementKind::regulator: {
      Regulator reg;
      reg.id = decl.id;
      reg.on_segment = r.text("segment");
      reg.phases = r.optional_phases().value_or(PhaseSet{});
      if (!r.optional_phases()) {
        // Inherit the regulated segment's phases.
        for (const auto& other : doc.declarations)
          if (other.kind == ElementKind::line && other.id == reg.on_segment)
            if (const Property* p = other.find("phases"))
              reg.phases = std::get<PhaseSet>(p->value);
      }
      reg.per_phase_tap = r.list("tap", reg.phases.size());
      e.regulators.push_back(std::move(reg));
      break;
    }
    case ElementKind::dg: {
      DGUnit dg;
      dg.id = decl.id;
      dg.bus = r.text("bus");
      dg.phases = shunt_phases(r);
      dg.p_min_kw = r.real("pmin_kw", 0.0);
      dg.p_max_kw = r.real("pmax_kw");
      dg.capacity_kw = r.real("capacity_kw", dg.p_min_kw);
      e.dg_units.push_back(std::move(dg));
      break;
    }
    }
  }

  // Reference resolution in declaration order.
  std::map<std::string, bool> bus_ids;
  for (const auto& b : e.buses)
    bus_ids[b.id] = true;
  std::map<std::string, bool> segment_ids;
  for (const auto& s : e.segments)
    segment_ids[s.id] = true;
  auto require_bus = [&](const Property& p) {
    const auto& id = std::get<std::string>(p.value);
    if (!bus_ids.count(id))
      throw BuildError(BuildError::Kind::unresolved_reference, id, {}, p.pos);
  };
  for (const auto& decl : doc.declarations) {
    for (const char* key : {"from", "to", "bus"})
      if (const Property* p = decl.find(key))
        require_bus(*p);
    if (const Property* p = decl.find("segment")) {
      const auto& id = std::get<std::string>(p->value);
      if (!segment_ids.count(id))
        throw BuildError(BuildError::Kind::unresolved_reference, id, {}, p->pos);
    }
  }

  PhasedNetwork network(std::move(e));
  auto report = validate(network);
  if (!report.empty())
    throw BuildError(BuildError::Kind::validation_failed, "", std::move(report));
  return network;
}

} // namespace mphase
