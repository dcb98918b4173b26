#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "blcs/common/types.hpp"
#include "blcs/fron/spectrum.hpp"

namespace blcs::fron {

enum class DomainKind { wireless, optical, computing };

std::string_view to_string(DomainKind k) noexcept;
DomainKind domain_kind_from_string(std::string_view s);

struct Domain {
  DomainId id = 0;
  std::string name;
  DomainKind kind = DomainKind::optical;
  ControllerId controller = 0;
  std::vector<NodeId> nodes;
};

struct Node {
  NodeId id = 0;
  DomainId domain = 0;
  std::string name;
};

struct Link {
  LinkId id = 0;
  NodeId a = 0;
  NodeId b = 0;
  bool inter_domain = false;
  Tick delay = 1;
  SpectrumMask spectrum;

  NodeId other(NodeId n) const noexcept { return n == a ? b : a; }
};

struct Lightpath {
  LightpathId id = 0;
  std::vector<LinkId> links;
  SlotInterval slots;
  RequestId owner = 0;
};

/// Domains, nodes and links with per-link spectrum and the committed lightpaths.
/// Ids are dense indices assigned in insertion order.
class Topology {
 public:
  explicit Topology(int slots = kDefaultSlots);

  DomainId add_domain(std::string name, DomainKind kind, ControllerId controller);
  NodeId add_node(DomainId domain, std::string name);
  LinkId add_link(NodeId a, NodeId b, Tick delay);

  int slots() const noexcept { return slots_; }
  const std::vector<Domain>& domains() const noexcept { return domains_; }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const std::vector<Link>& links() const noexcept { return links_; }
  const Domain& domain(DomainId id) const;
  const Node& node(NodeId id) const;
  const Link& link(LinkId id) const;
  DomainId domain_of(NodeId n) const { return node(n).domain; }
  DomainId domain_of_controller(ControllerId c) const;
  /// Links incident to node `n`, ascending id.
  const std::vector<LinkId>& incident(NodeId n) const;
  /// Domains touched by a link (one for intra-domain links).
  std::vector<DomainId> link_domains(LinkId id) const;

  /// Throws InvalidInput unless every slot of `lp.slots` is free on every link.
  void commit(const Lightpath& lp);
  void release(LightpathId id);
  const std::map<LightpathId, Lightpath>& lightpaths() const noexcept { return lightpaths_; }
  /// Skeletons of the committed lightpaths, ascending id.
  std::vector<Skeleton> skeletons() const;

  /// Masks and lightpath records agree, every lightpath is continuous and
  /// contiguous, and link paths are connected. Throws Inconsistent otherwise.
  void audit() const;

  /// Number of slot-occupied link slots divided by all link slots.
  double utilization(LinkId id) const;

 private:
  int slots_;
  std::vector<Domain> domains_;
  std::vector<Node> nodes_;
  std::vector<Link> links_;
  std::vector<std::vector<LinkId>> incident_;
  std::map<LightpathId, Lightpath> lightpaths_;
};

/// Throws ConfigError naming the offending field.
Topology topology_from_json(const nlohmann::json& j);
nlohmann::json topology_to_json(const Topology& t);

}  // namespace blcs::fron
