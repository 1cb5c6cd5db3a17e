#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <set>

#include "mphase/feeder/network.hpp"

namespace mphase {

namespace {

class ReportBuilder {
public:
  void add(const std::string& id, std::string reason) { report_.push_back({id, std::move(reason)}); }

  ValidationReport finish() {
    std::stable_sort(report_.begin(), report_.end(), [](const Violation& a, const Violation& b) {
      if (a.element_id != b.element_id)
        return a.element_id < b.element_id;
      return a.reason < b.reason;
    });
    return std::move(report_);
  }

private:
  ValidationReport report_;
};

template <typename T>
void check_duplicates(const std::vector<T>& items, ReportBuilder& out) {
  std::set<std::string> seen;
  for (const auto& item : items)
    if (!seen.insert(item.id).second)
      out.add(item.id, "duplicate id");
}

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }
bool nonnegative_finite(double v) { return std::isfinite(v) && v >= 0.0; }

// Checks that `bus_id` exists and carries every phase in `phases`.
void check_bus_phases(const PhasedNetwork& net, const std::string& element_id,
                      const std::string& bus_id, PhaseSet phases, ReportBuilder& out) {
  auto bus = net.find_bus(bus_id);
  if (!bus) {
    out.add(element_id, "unknown bus " + bus_id);
    return;
  }
  if (!phases.is_subset_of(net.buses()[*bus].phases))
    out.add(element_id, "phase not present at bus " + bus_id);
}

void check_per_phase(const std::string& element_id, const char* what,
                     const std::vector<double>& values, PhaseSet phases, bool nonnegative,
                     ReportBuilder& out) {
  if (values.size() != phases.size()) {
    out.add(element_id, std::string(what) + " count does not match phase count");
    return;
  }
  for (double v : values) {
    if (!std::isfinite(v)) {
      out.add(element_id, std::string(what) + " must be finite");
      return;
    }
    if (nonnegative && v < 0.0) {
      out.add(element_id, std::string(what) + " must be nonnegative");
      return;
    }
  }
}

struct DisjointSets {
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x)
      x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b)
      return false;
    parent[b] = a;
    return true;
  }
  std::vector<std::size_t> parent;
};

void check_topology(const PhasedNetwork& net, ReportBuilder& out) {
  const auto source = net.source_bus();
  if (!source)
    return; // reported separately

  // Branches in id order, skipping ones with dangling endpoints.
  std::vector<BranchRef> branches;
  for (std::size_t i = 0; i < net.branch_count(); ++i) {
    BranchRef ref = net.branch_at(i);
    if (net.find_bus(net.branch_from(ref)) && net.find_bus(net.branch_to(ref)) &&
        net.branch_from(ref) != net.branch_to(ref))
      branches.push_back(ref);
  }
  std::stable_sort(branches.begin(), branches.end(), [&](BranchRef a, BranchRef b) {
    return net.branch_id(a) < net.branch_id(b);
  });

  const std::size_t n = net.buses().size();
  DisjointSets sets(n);
  std::vector<std::vector<BranchRef>> adjacency(n);
  for (BranchRef ref : branches) {
    const std::size_t from = *net.find_bus(net.branch_from(ref));
    const std::size_t to = *net.find_bus(net.branch_to(ref));
    if (!sets.unite(from, to)) {
      out.add(net.branch_id(ref), "not radial");
      continue;
    }
    adjacency[from].push_back(ref);
    adjacency[to].push_back(ref);
  }

  // Walk the spanning forest from the source to check orientation and feeding.
  std::vector<bool> seen(n, false);
  std::deque<std::size_t> queue{*source};
  seen[*source] = true;
  while (!queue.empty()) {
    const std::size_t bus = queue.front();
    queue.pop_front();
    for (BranchRef ref : adjacency[bus]) {
      const std::size_t from = *net.find_bus(net.branch_from(ref));
      const std::size_t to = *net.find_bus(net.branch_to(ref));
      const std::size_t other = from == bus ? to : from;
      if (seen[other])
        continue;
      seen[other] = true;
      queue.push_back(other);
      if (from != bus)
        out.add(net.branch_id(ref), "branch points toward the source");
      else if (!net.buses()[to].phases.is_subset_of(net.branch_phases(ref)))
        out.add(net.buses()[to].id, "phase not fed by incoming branch " + net.branch_id(ref));
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!seen[i])
      out.add(net.buses()[i].id, "not radial: unreachable from source");
}

} // namespace

ValidationReport validate(const PhasedNetwork& net) {
  ReportBuilder out;
  const std::string network_id = net.name().empty() ? "network" : net.name();

  check_duplicates(net.buses(), out);
  check_duplicates(net.segments(), out);
  check_duplicates(net.transformers(), out);
  check_duplicates(net.loads(), out);
  check_duplicates(net.capacitors(), out);
  check_duplicates(net.regulators(), out);
  check_duplicates(net.dg_units(), out);
  {
    std::set<std::string> segment_ids;
    for (const auto& s : net.segments())
      segment_ids.insert(s.id);
    for (const auto& t : net.transformers())
      if (segment_ids.count(t.id))
        out.add(t.id, "branch id shared by a line and a transformer");
  }

  std::size_t sources = 0;
  for (const auto& bus : net.buses()) {
    if (!positive_finite(bus.nominal_voltage))
      out.add(bus.id, "nominal voltage must be positive");
    if (bus.is_source && ++sources > 1)
      out.add(bus.id, "more than one source bus");
  }
  if (sources == 0)
    out.add(network_id, "no source bus");

  const auto& limits = net.limits();
  if (!(positive_finite(limits.min_pu) && std::isfinite(limits.max_pu) && limits.min_pu < limits.max_pu))
    out.add(network_id, "voltage limits must satisfy 0 < vmin < vmax");

  for (const auto& seg : net.segments()) {
    check_bus_phases(net, seg.id, seg.from_bus, seg.phases, out);
    check_bus_phases(net, seg.id, seg.to_bus, seg.phases, out);
    if (seg.from_bus == seg.to_bus)
      out.add(seg.id, "branch connects a bus to itself");
    if (seg.z.dim() != seg.phases.size())
      out.add(seg.id, "impedance matrix dimension does not match phase count");
    else if (!seg.z.is_symmetric())
      out.add(seg.id, "impedance matrix is not symmetric");
    if (!std::isfinite(std::abs(seg.z.determinant())))
      out.add(seg.id, "impedance matrix must be finite");
    if (!(seg.ampacity > 0.0) || std::isnan(seg.ampacity))
      out.add(seg.id, "ampacity must be positive");
    if (seg.length_m && !nonnegative_finite(*seg.length_m))
      out.add(seg.id, "length must be nonnegative");
  }

  for (const auto& tx : net.transformers()) {
    check_bus_phases(net, tx.id, tx.from_bus, tx.phases, out);
    check_bus_phases(net, tx.id, tx.to_bus, tx.phases, out);
    if (tx.from_bus == tx.to_bus)
      out.add(tx.id, "branch connects a bus to itself");
    if (!positive_finite(tx.rating_kva))
      out.add(tx.id, "rating must be positive");
    if (!nonnegative_finite(tx.series_impedance_pu.real()) ||
        !std::isfinite(tx.series_impedance_pu.imag()))
      out.add(tx.id, "series resistance must be nonnegative");
    if (!positive_finite(tx.tap))
      out.add(tx.id, "tap must be positive");
  }

  for (const auto& load : net.loads()) {
    check_bus_phases(net, load.id, load.bus, load.phases, out);
    check_per_phase(load.id, "kw", load.per_phase_kw, load.phases, true, out);
    check_per_phase(load.id, "kvar", load.per_phase_kvar, load.phases, false, out);
    if (load.connection == LoadConnection::delta && load.phases.size() < 2)
      out.add(load.id, "delta connection needs at least two phases");
  }

  for (const auto& cap : net.capacitors()) {
    check_bus_phases(net, cap.id, cap.bus, cap.phases, out);
    check_per_phase(cap.id, "kvar", cap.per_phase_kvar, cap.phases, true, out);
  }

  {
    std::map<std::string, std::string> regulated;
    for (const auto& reg : net.regulators()) {
      auto branch = net.find_branch(reg.on_segment);
      if (!branch || branch->kind != BranchKind::segment) {
        out.add(reg.id, "unknown segment " + reg.on_segment);
      } else {
        if (!reg.phases.is_subset_of(net.segments()[branch->index].phases))
          out.add(reg.id, "phase not present on segment " + reg.on_segment);
        if (!regulated.emplace(reg.on_segment, reg.id).second)
          out.add(reg.id, "segment already regulated by " + regulated[reg.on_segment]);
      }
      check_per_phase(reg.id, "tap", reg.per_phase_tap, reg.phases, true, out);
      for (double tap : reg.per_phase_tap)
        if (tap < kRegulatorTapMin || tap > kRegulatorTapMax) {
          out.add(reg.id, "tap outside [0.9, 1.1]");
          break;
        }
    }
  }

  for (const auto& dg : net.dg_units()) {
    check_bus_phases(net, dg.id, dg.bus, dg.phases, out);
    if (!nonnegative_finite(dg.p_min_kw))
      out.add(dg.id, "minimum capacity must be nonnegative");
    if (!std::isfinite(dg.p_max_kw) || dg.p_max_kw < dg.p_min_kw)
      out.add(dg.id, "maximum capacity below minimum");
    if (!(dg.capacity_kw >= dg.p_min_kw && dg.capacity_kw <= dg.p_max_kw))
      out.add(dg.id, "capacity outside bounds");
  }

  check_topology(net, out);
  return out.finish();
}

std::vector<BranchRef> radial_order(const PhasedNetwork& net) {
  const auto source = net.source_bus();
  if (!source)
    throw NotRadial("network must have exactly one source bus");

  const std::size_t n = net.buses().size();
  std::vector<std::vector<BranchRef>> children(n);
  for (std::size_t i = 0; i < net.branch_count(); ++i) {
    BranchRef ref = net.branch_at(i);
    auto from = net.find_bus(net.branch_from(ref));
    if (!from || !net.find_bus(net.branch_to(ref)))
      throw NotRadial("branch " + net.branch_id(ref) + " references an unknown bus");
    children[*from].push_back(ref);
  }
  for (auto& list : children)
    std::stable_sort(list.begin(), list.end(), [&](BranchRef a, BranchRef b) {
      return net.branch_id(a) < net.branch_id(b);
    });

  std::vector<BranchRef> order;
  order.reserve(net.branch_count());
  std::vector<bool> seen(n, false);
  std::deque<std::size_t> queue{*source};
  seen[*source] = true;
  while (!queue.empty()) {
    const std::size_t bus = queue.front();
    queue.pop_front();
    for (BranchRef ref : children[bus]) {
      const std::size_t to = *net.find_bus(net.branch_to(ref));
      if (seen[to])
        throw NotRadial("branch " + net.branch_id(ref) + " closes a cycle");
      seen[to] = true;
      order.push_back(ref);
      queue.push_back(to);
    }
  }
  if (order.size() != net.branch_count())
    throw NotRadial("some branches are not reachable from the source");
  for (std::size_t i = 0; i < n; ++i)
    if (!seen[i])
      throw NotRadial("bus " + net.buses()[i].id + " is unreachable from the source");
  return order;
}

} // namespace mphase
