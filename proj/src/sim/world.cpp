#include "blcs/sim/world.hpp"

#include <algorithm>
#include <cmath>

#include "blcs/common/error.hpp"

namespace blcs::sim {

const std::vector<ObjectType>& object_types() {
  static const std::vector<ObjectType> types = {
      {"motor", {{"s_running", "b_adjust_speed"}, {"s_idle", "b_start"}}},
      {"robot", {{"s_running", "b_grasp"}, {"s_idle", "b_calibrate"}}},
      {"conveyor", {{"s_running", "b_transport"}, {"s_idle", "b_halt"}}},
      {"camera", {{"s_running", "b_capture"}, {"s_idle", "b_standby"}}},
      {"sensor", {{"s_running", "b_report"}, {"s_alarm", "b_alert"}}},
      {"arm", {{"s_running", "b_weld"}, {"s_idle", "b_home"}}},
      {"roadm", {{"s_normal", "b_setup_lightpath"}, {"s_congested", "b_defragment"}}},
      {"server", {{"s_normal", "b_allocate_vm"}, {"s_overloaded", "b_migrate_task"}}},
  };
  return types;
}

const ObjectType& object_type(const std::string& name) {
  for (const auto& t : object_types())
    if (t.name == name) return t;
  throw InvalidInput("unknown object type " + name);
}

const std::vector<std::string>& abnormal_behaviors() {
  static const std::vector<std::string> b = {"b_falsify_spectrum", "b_corrupt_segment", "b_handling_error",
                                             "b_replay_event"};
  return b;
}

namespace {

constexpr std::size_t kPhysicalTypes = 6;

bool has_inter_link(const fron::Topology& topo, NodeId n) {
  for (LinkId l : topo.incident(n))
    if (topo.link(l).inter_domain) return true;
  return false;
}

}  // namespace

World build_world(const fron::Topology& topo, int physical_objects) {
  World w;
  std::vector<NodeId> access;
  for (const auto& d : topo.domains()) {
    if (d.kind == fron::DomainKind::wireless) {
      w.requester_domains.push_back(d.id);
      for (NodeId n : d.nodes)
        if (!has_inter_link(topo, n)) access.push_back(n);
    } else {
      w.eligible.push_back(d.controller);
      for (NodeId n : d.nodes) {
        const bool optical = d.kind == fron::DomainKind::optical;
        w.objects.push_back({(optical ? "roadm_" : "server_") + topo.node(n).name, optical ? "roadm" : "server", d.id, n});
        if (!optical && !has_inter_link(topo, n)) w.destinations.push_back(n);
      }
    }
  }
  if (w.requester_domains.empty()) throw ConfigError("topology.domains", "needs a wireless domain");
  if (access.empty()) throw ConfigError("topology.domains", "wireless domains need a node without inter-domain links");
  if (w.destinations.empty())
    throw ConfigError("topology.domains", "needs a computing node without inter-domain links");

  std::vector<int> per_type(kPhysicalTypes, 0);
  for (int k = 0; k < physical_objects; ++k) {
    const auto& type = object_types()[static_cast<std::size_t>(k) % kPhysicalTypes];
    int serial = ++per_type[static_cast<std::size_t>(k) % kPhysicalTypes];
    char buf[16];
    std::snprintf(buf, sizeof buf, "_%02d", serial);
    NodeId n = access[static_cast<std::size_t>(k) % access.size()];
    w.requesters.push_back(w.objects.size());
    w.objects.push_back({type.name + buf, type.name, topo.domain_of(n), n});
  }

  w.registry = std::make_shared<kb::EntityRegistry>();
  for (std::size_t i = 0; i < w.objects.size(); ++i) {
    const auto& o = w.objects[i];
    w.directory[o.token] = o.domain;
    w.objects_by_domain[o.domain].push_back(i);
    w.registry->add(kb::Base::identification, o.token);
    w.vocabulary.add(o.token);
  }
  for (const auto& t : object_types())
    for (const auto& [s, b] : t.pairs) {
      w.registry->add(kb::Base::status, s);
      w.registry->add(kb::Base::behavior, b);
      w.vocabulary.add(s);
      w.vocabulary.add(b);
    }
  for (const auto& b : abnormal_behaviors()) {
    w.registry->add(kb::Base::behavior, b);
    w.vocabulary.add(b);
  }
  return w;
}

bool valid_act(const World& w, const kb::TokenTriple& t) {
  auto it = std::find_if(w.objects.begin(), w.objects.end(), [&](const auto& o) { return o.token == t.identification; });
  if (it == w.objects.end()) return false;
  for (const auto& [s, b] : object_type(it->type).pairs)
    if (s == t.status && b == t.behavior) return true;
  return false;
}

Affair draw_affair(const World& w, DomainId domain, bool malicious, const MaliciousProfile& profile, Rng& rng,
                   Tick tick, std::uint64_t serial) {
  const auto& ids = w.objects_by_domain.at(domain);
  const auto& obj = w.objects[ids[rng.index(ids.size())]];
  const auto& pairs = object_type(obj.type).pairs;
  std::size_t p = rng.index(pairs.size());
  Affair a;
  a.event_id = "ev-" + std::to_string(serial);
  a.triple = {obj.token, pairs[p].first, pairs[p].second, tick, domain};
  if (malicious && rng.bernoulli(profile.abnormal_act)) {
    a.abnormal = true;
    if (rng.bernoulli(0.5)) {
      a.triple.behavior = pairs[(p + 1 + rng.index(pairs.size() - 1)) % pairs.size()].second;
    } else {
      a.triple.behavior = abnormal_behaviors()[rng.index(abnormal_behaviors().size())];
    }
  }
  return a;
}

Assignment inject_malicious(std::span<const ControllerId> eligible, double ratio, bool collusion, std::uint64_t seed) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) throw InvalidInput("malicious ratio must lie in [0, 1]");
  Rng rng(derive_seed(seed, Stream::injection));
  const double v = rng.uniform();
  std::vector<ControllerId> order(eligible.begin(), eligible.end());
  std::sort(order.begin(), order.end());
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
  const double expected = ratio * static_cast<double>(order.size());
  auto count = static_cast<std::size_t>(std::floor(expected + v));
  // an integral expectation is exact
  if (std::abs(expected - std::round(expected)) < 1e-9) count = static_cast<std::size_t>(std::round(expected));
  count = std::min(count, order.size());
  Assignment a;
  a.collusion = collusion;
  a.malicious.insert(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count));
  return a;
}

}  // namespace blcs::sim
