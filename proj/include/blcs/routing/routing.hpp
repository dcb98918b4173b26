#pragma once

#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "blcs/common/types.hpp"
#include "blcs/fron/topology.hpp"

namespace blcs::routing {

struct RouteRequest {
  RequestId id = 0;
  NodeId source = 0;
  NodeId destination = 0;
  int width = 1;
  Tick arrival = 0;
  Tick holding = 1;
};

enum class BlockReason { NoPath, NoSpectrum, StalePlan, Unroutable, SetupFault };

std::string_view to_string(BlockReason r) noexcept;

struct Blocked {
  BlockReason reason = BlockReason::NoPath;
  std::string detail;
};

/// Domains the requester is willing to route through and the inter-domain
/// links between them.
struct DomainGraph {
  std::set<DomainId> domains;
  std::set<LinkId> inter_links;
};

struct RoutePlan {
  std::vector<DomainId> domains;  // in traversal order
  std::vector<NodeId> nodes;      // source ... destination
  std::vector<LinkId> links;
  fron::SlotInterval slots;
  std::set<ControllerId> authenticated;
};

using TrustPredicate = std::function<bool(DomainId)>;

/// Drops distrusted domains and their inter-domain links. Unroutable when the
/// source or destination domain is distrusted.
std::variant<DomainGraph, Blocked> trusted_domain_graph(const fron::Topology& topo, const RouteRequest& req,
                                                        const TrustPredicate& trusted);

/// Hierarchical greedy: from the current domain pick the exit link toward an
/// unvisited allowed domain by (domain hops to the destination, utilisation,
/// link id) among exits that keep a free interval of `req.width`; inside a
/// domain take the shortest-delay path over spectrum-compatible links; finish
/// with first fit on the stitched path.
std::variant<RoutePlan, Blocked> greedy_route(const fron::Topology& topo, const DomainGraph& graph,
                                              const RouteRequest& req);

struct ProvisionCost {
  Tick per_domain = 5;
  Tick per_auth_round = 20;
};

struct Provisioned {
  fron::Lightpath lightpath;
  Tick latency = 0;
  Tick release_at = 0;
};

/// Commits the plan atomically. A plan whose slots are no longer free yields
/// StalePlan and leaves the topology untouched.
std::variant<Provisioned, Blocked> provision(const RoutePlan& plan, fron::Topology& topo, const RouteRequest& req,
                                             LightpathId lightpath_id, int auth_rounds,
                                             const ProvisionCost& cost = {});

/// Throws Inconsistent when the plan is not a connected, spectrum-feasible
/// path through trusted domains matching its own domain list.
void audit_plan(const fron::Topology& topo, const RouteRequest& req, const RoutePlan& plan,
                const TrustPredicate& trusted);

}  // namespace blcs::routing
