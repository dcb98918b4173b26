#include "blcs/fron/topology.hpp"

#include <algorithm>
#include <set>

#include "blcs/common/error.hpp"

namespace blcs::fron {

std::string_view to_string(DomainKind k) noexcept {
  switch (k) {
    case DomainKind::wireless: return "wireless";
    case DomainKind::optical: return "optical";
    case DomainKind::computing: return "computing";
  }
  return "optical";
}

DomainKind domain_kind_from_string(std::string_view s) {
  if (s == "wireless") return DomainKind::wireless;
  if (s == "optical") return DomainKind::optical;
  if (s == "computing") return DomainKind::computing;
  throw InvalidInput("unknown domain kind '" + std::string(s) + "'");
}

Topology::Topology(int slots) : slots_(slots) {
  if (slots < 1 || slots > kMaxSlots) throw InvalidInput("slot count must lie in [1, 64]");
}

DomainId Topology::add_domain(std::string name, DomainKind kind, ControllerId controller) {
  for (const auto& d : domains_)
    if (d.controller == controller) throw InvalidInput("controller already manages a domain");
  const auto id = static_cast<DomainId>(domains_.size());
  domains_.push_back({id, std::move(name), kind, controller, {}});
  return id;
}

NodeId Topology::add_node(DomainId domain, std::string name) {
  if (domain < 0 || domain >= static_cast<DomainId>(domains_.size())) throw InvalidInput("node added to unknown domain");
  const auto id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back({id, domain, std::move(name)});
  domains_[static_cast<std::size_t>(domain)].nodes.push_back(id);
  incident_.emplace_back();
  return id;
}

LinkId Topology::add_link(NodeId a, NodeId b, Tick delay) {
  if (a == b) throw InvalidInput("link endpoints must differ");
  node(a);
  node(b);
  if (delay < 1) throw InvalidInput("link delay must be >= 1");
  const auto id = static_cast<LinkId>(links_.size());
  links_.push_back({id, a, b, domain_of(a) != domain_of(b), delay, SpectrumMask(slots_)});
  incident_[static_cast<std::size_t>(a)].push_back(id);
  incident_[static_cast<std::size_t>(b)].push_back(id);
  return id;
}

const Domain& Topology::domain(DomainId id) const {
  if (id < 0 || id >= static_cast<DomainId>(domains_.size())) throw InvalidInput("unknown domain id");
  return domains_[static_cast<std::size_t>(id)];
}

const Node& Topology::node(NodeId id) const {
  if (id < 0 || id >= static_cast<NodeId>(nodes_.size())) throw InvalidInput("unknown node id");
  return nodes_[static_cast<std::size_t>(id)];
}

const Link& Topology::link(LinkId id) const {
  if (id < 0 || id >= static_cast<LinkId>(links_.size())) throw InvalidInput("unknown link id");
  return links_[static_cast<std::size_t>(id)];
}

DomainId Topology::domain_of_controller(ControllerId c) const {
  for (const auto& d : domains_)
    if (d.controller == c) return d.id;
  throw InvalidInput("unknown controller id");
}

const std::vector<LinkId>& Topology::incident(NodeId n) const {
  node(n);
  return incident_[static_cast<std::size_t>(n)];
}

std::vector<DomainId> Topology::link_domains(LinkId id) const {
  const auto& l = link(id);
  const DomainId da = domain_of(l.a), db = domain_of(l.b);
  if (da == db) return {da};
  return {std::min(da, db), std::max(da, db)};
}

void Topology::commit(const Lightpath& lp) {
  if (lp.id == 0) throw InvalidInput("lightpath id 0 is reserved");
  if (lightpaths_.count(lp.id)) throw InvalidInput("lightpath id already committed");
  if (lp.links.empty()) throw InvalidInput("lightpath without links");
  for (LinkId l : lp.links)
    if (!link(l).spectrum.range_free(lp.slots)) throw InvalidInput("lightpath slots are not free");
  for (LinkId l : lp.links) links_[static_cast<std::size_t>(l)].spectrum.occupy(lp.slots, lp.id);
  lightpaths_.emplace(lp.id, lp);
}

void Topology::release(LightpathId id) {
  auto it = lightpaths_.find(id);
  if (it == lightpaths_.end()) throw InvalidInput("release of unknown lightpath");
  for (LinkId l : it->second.links) links_[static_cast<std::size_t>(l)].spectrum.release(id);
  lightpaths_.erase(it);
}

std::vector<Skeleton> Topology::skeletons() const {
  std::vector<Skeleton> out;
  for (const auto& [id, lp] : lightpaths_) out.push_back({id, lp.links});
  return out;
}

void Topology::audit() const {
  std::map<LightpathId, std::set<LinkId>> seen;
  for (const auto& l : links_) {
    for (int s = 0; s < slots_; ++s) {
      const LightpathId o = l.spectrum.owner(s);
      if (o == 0) continue;
      auto it = lightpaths_.find(o);
      if (it == lightpaths_.end() || !it->second.slots.contains(s))
        throw Inconsistent("link " + std::to_string(l.id) + " slot " + std::to_string(s) + " has a stray owner");
      seen[o].insert(l.id);
    }
  }
  for (const auto& [id, lp] : lightpaths_) {
    if (lp.slots.hi < lp.slots.lo) throw Inconsistent("lightpath interval is empty");
    for (LinkId l : lp.links) {
      for (int s = lp.slots.lo; s <= lp.slots.hi; ++s)
        if (link(l).spectrum.owner(s) != id)
          throw Inconsistent("lightpath " + std::to_string(id) + " breaks continuity on link " + std::to_string(l));
    }
    if (seen[id] != std::set<LinkId>(lp.links.begin(), lp.links.end()))
      throw Inconsistent("lightpath " + std::to_string(id) + " occupies links outside its path");
    // consecutive links must share an endpoint
    for (std::size_t k = 1; k < lp.links.size(); ++k) {
      const auto& p = link(lp.links[k - 1]);
      const auto& q = link(lp.links[k]);
      if (p.a != q.a && p.a != q.b && p.b != q.a && p.b != q.b)
        throw Inconsistent("lightpath " + std::to_string(id) + " is not a connected path");
    }
  }
}

double Topology::utilization(LinkId id) const {
  return static_cast<double>(link(id).spectrum.occupied_count()) / static_cast<double>(slots_);
}

namespace {

template <class T>
T field(const nlohmann::json& j, const char* key, const std::string& path) {
  if (!j.contains(key)) throw ConfigError(path + "." + key, "missing");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(path + "." + key, "wrong type");
  }
}

}  // namespace

Topology topology_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("topology", "expected an object");
  const int slots = j.contains("slots") ? field<int>(j, "slots", "topology") : kDefaultSlots;
  if (slots < 1 || slots > kMaxSlots) throw ConfigError("topology.slots", "must lie in [1, 64]");
  Topology t(slots);
  if (!j.contains("domains") || !j.at("domains").is_array() || j.at("domains").empty())
    throw ConfigError("topology.domains", "must be a non-empty array");
  std::map<int, NodeId> node_ids;
  std::set<int> controllers;
  for (std::size_t d = 0; d < j.at("domains").size(); ++d) {
    const auto& dj = j.at("domains")[d];
    const std::string path = "topology.domains[" + std::to_string(d) + "]";
    DomainKind kind;
    try {
      kind = domain_kind_from_string(field<std::string>(dj, "kind", path));
    } catch (const InvalidInput& e) {
      throw ConfigError(path + ".kind", e.what());
    }
    const int controller = dj.contains("controller") ? field<int>(dj, "controller", path) : static_cast<int>(d);
    if (!controllers.insert(controller).second) throw ConfigError(path + ".controller", "duplicate controller id");
    const DomainId id = t.add_domain(field<std::string>(dj, "name", path), kind, controller);
    const auto nodes = field<std::vector<nlohmann::json>>(dj, "nodes", path);
    if (nodes.empty()) throw ConfigError(path + ".nodes", "a domain needs at least one node");
    for (std::size_t n = 0; n < nodes.size(); ++n) {
      const std::string npath = path + ".nodes[" + std::to_string(n) + "]";
      const int ext = field<int>(nodes[n], "id", npath);
      const std::string name = nodes[n].contains("name") ? field<std::string>(nodes[n], "name", npath)
                                                         : "n" + std::to_string(ext);
      if (node_ids.count(ext)) throw ConfigError(npath + ".id", "node listed in two places");
      node_ids[ext] = t.add_node(id, name);
    }
  }
  if (!j.contains("links") || !j.at("links").is_array()) throw ConfigError("topology.links", "must be an array");
  for (std::size_t l = 0; l < j.at("links").size(); ++l) {
    const auto& lj = j.at("links")[l];
    const std::string path = "topology.links[" + std::to_string(l) + "]";
    const int a = field<int>(lj, "a", path), b = field<int>(lj, "b", path);
    if (!node_ids.count(a)) throw ConfigError(path + ".a", "unknown node");
    if (!node_ids.count(b)) throw ConfigError(path + ".b", "unknown node");
    if (a == b) throw ConfigError(path, "endpoints must differ");
    const Tick delay = lj.contains("delay") ? field<Tick>(lj, "delay", path) : 1;
    if (delay < 1) throw ConfigError(path + ".delay", "must be >= 1");
    t.add_link(node_ids[a], node_ids[b], delay);
  }
  return t;
}

nlohmann::json topology_to_json(const Topology& t) {
  nlohmann::json domains = nlohmann::json::array();
  for (const auto& d : t.domains()) {
    nlohmann::json nodes = nlohmann::json::array();
    for (NodeId n : d.nodes) nodes.push_back({{"id", n}, {"name", t.node(n).name}});
    domains.push_back({{"name", d.name}, {"kind", to_string(d.kind)}, {"controller", d.controller}, {"nodes", nodes}});
  }
  nlohmann::json links = nlohmann::json::array();
  for (const auto& l : t.links()) links.push_back({{"a", l.a}, {"b", l.b}, {"delay", l.delay}});
  return {{"slots", t.slots()}, {"domains", domains}, {"links", links}};
}

}  // namespace blcs::fron
